# Generated by Django 5.0.3 on 2026-10-17 12:00

from django.db import migrations, models


class Migration(migrations.Migration):
    dependencies = [
        ('experiments', '0001_initial'),
    ]

    operations = [
        migrations.AlterField(
            model_name='experimentrun',
            name='kind',
            field=models.CharField(
                choices=[
                    ('HARNACK', 'harnack'),
                    ('WEAK_HARNACK', 'weak_harnack'),
                    ('LOCAL_MAX', 'local_max'),
                    ('ABP', 'abp'),
                    ('CHAIN', 'chain'),
                    ('SMP', 'smp'),
                    ('DEAD_CORE', 'dead_core'),
                    ('LANDIS', 'landis'),
                    ('ORACLE', 'oracle'),
                    ('CALIBRATION', 'calibration'),
                ],
                max_length=20,
            ),
        ),
    ]
