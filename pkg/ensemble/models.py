from django.db import models

class SimulationRun(models.Model):
    timestamp = models.DateTimeField(auto_now_add=True)
    model = models.CharField(max_length=32)
    two_s = models.IntegerField()
    sites = models.IntegerField()
    configurations = models.IntegerField()
    seed = models.BigIntegerField()
    output_dir = models.TextField()
    trio_fraction = models.FloatField()
    wall_time_seconds = models.FloatField()

    class Meta:
        ordering = ['-timestamp']

    def as_json(self):
        return {
            'id': self.id,
            'timestamp': self.timestamp.isoformat(),
            'model': self.model,
            'two_s': self.two_s,
            'sites': self.sites,
            'configurations': self.configurations,
            'seed': self.seed,
            'output_dir': self.output_dir,
            'trio_fraction': self.trio_fraction,
            'wall_time_seconds': self.wall_time_seconds,
        }
