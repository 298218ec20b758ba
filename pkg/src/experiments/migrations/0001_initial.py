# Generated by Django 5.0.3 on 2026-10-17 09:00

from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                (
                    'id',
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name='ID',
                    ),
                ),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
                (
                    'status',
                    models.CharField(
                        choices=[
                            ('PENDING', 'Pending'),
                            ('RUNNING', 'Running'),
                            ('COMPLETED', 'Completed'),
                            ('VIOLATION', 'Completed with violations'),
                            ('FAILED', 'Failed'),
                        ],
                        default='PENDING',
                        max_length=20,
                    ),
                ),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
                (
                    'kind',
                    models.CharField(
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
                        ],
                        max_length=20,
                    ),
                ),
                ('name', models.CharField(max_length=100)),
                ('config', models.JSONField()),
                (
                    'seed',
                    models.DecimalField(decimal_places=0, default=0, max_digits=20),
                ),
                (
                    'output_dir',
                    models.CharField(blank=True, default='', max_length=1024),
                ),
                ('output_files', models.JSONField(blank=True, default=list)),
                ('violation_count', models.PositiveIntegerField(default=0)),
                ('summary', models.JSONField(blank=True, default=dict)),
                ('error', models.TextField(blank=True, default='')),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
