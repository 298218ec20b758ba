from django.db import models

from common.models import LabModelMixin, RunStatusEnum

from .constants import ExperimentKindEnum


class ExperimentRun(LabModelMixin):
    """One execution of a validated experiment config."""

    kind = models.CharField(
        max_length=20,
        choices=[(k.name, k.value) for k in ExperimentKindEnum],
    )
    name = models.CharField(max_length=100)
    config = models.JSONField()
    # 64-bit unsigned seeds do not fit a signed BigIntegerField
    seed = models.DecimalField(max_digits=20, decimal_places=0, default=0)
    output_dir = models.CharField(max_length=1024, blank=True, default='')
    output_files = models.JSONField(default=list, blank=True)
    violation_count = models.PositiveIntegerField(default=0)
    summary = models.JSONField(default=dict, blank=True)
    error = models.TextField(blank=True, default='')

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f'{self.name} ({ExperimentKindEnum[self.kind].value}, {RunStatusEnum[self.status].value})'

    @property
    def kind_enum(self) -> ExperimentKindEnum:
        return ExperimentKindEnum[self.kind]
