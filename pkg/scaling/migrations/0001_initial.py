from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ScalingFitRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('timestamp', models.DateTimeField(auto_now_add=True)),
                ('model', models.CharField(max_length=32)),
                ('two_s', models.IntegerField()),
                ('q_ext', models.FloatField()),
                ('delta_q_ext', models.FloatField()),
                ('c_eff', models.FloatField()),
                ('q_ext_linear_pred', models.FloatField()),
                ('chi2_reduced', models.FloatField(null=True)),
                ('fit_path', models.TextField()),
            ],
            options={
                'ordering': ['-timestamp'],
            },
        ),
    ]
