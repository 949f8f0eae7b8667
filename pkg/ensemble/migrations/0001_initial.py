from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('timestamp', models.DateTimeField(auto_now_add=True)),
                ('model', models.CharField(max_length=32)),
                ('two_s', models.IntegerField()),
                ('sites', models.IntegerField()),
                ('configurations', models.IntegerField()),
                ('seed', models.BigIntegerField()),
                ('output_dir', models.TextField()),
                ('trio_fraction', models.FloatField()),
                ('wall_time_seconds', models.FloatField()),
            ],
            options={
                'ordering': ['-timestamp'],
            },
        ),
    ]
