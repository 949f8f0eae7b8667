from django.db import models

class ScalingFitRecord(models.Model):
    timestamp = models.DateTimeField(auto_now_add=True)
    model = models.CharField(max_length=32)
    two_s = models.IntegerField()
    q_ext = models.FloatField()
    delta_q_ext = models.FloatField()
    c_eff = models.FloatField()
    q_ext_linear_pred = models.FloatField()
    chi2_reduced = models.FloatField(null=True)
    fit_path = models.TextField()

    class Meta:
        ordering = ['-timestamp']

    def as_json(self):
        return {
            'id': self.id,
            'timestamp': self.timestamp.isoformat(),
            'model': self.model,
            'two_s': self.two_s,
            'q_ext': self.q_ext,
            'delta_q_ext': self.delta_q_ext,
            'c_eff': self.c_eff,
            'q_ext_linear_pred': self.q_ext_linear_pred,
            'chi2_reduced': self.chi2_reduced,
            'fit_path': self.fit_path,
        }
