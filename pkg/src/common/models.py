from enum import Enum

from django.db import models
from django.utils import timezone


class TimeStampMixin(models.Model):
    """
    A mixin that adds `created_at` and `updated_at` timestamp fields to a
    model, along with automatic updating of the `updated_at` field whenever an
    instance of the model is saved.
    """

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True

    def save(self, *args, **kwargs):
        self.updated_at = timezone.now()
        super().save(*args, **kwargs)


class RunStatusEnum(Enum):
    PENDING = 'Pending'
    RUNNING = 'Running'
    COMPLETED = 'Completed'
    VIOLATION = 'Completed with violations'
    FAILED = 'Failed'


class RunStatusMixin(models.Model):
    """
    A mixin that tracks the lifecycle of a long-running computation: a status
    and the time the computation finished.
    """

    status = models.CharField(
        max_length=20,
        choices=[(s.name, s.value) for s in RunStatusEnum],
        default=RunStatusEnum.PENDING.name,
    )
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        abstract = True

    def mark(self, status: RunStatusEnum):
        """
        Sets the status and, for terminal states, the finish time.
        """
        self.status = status.name
        update_fields = ['status', 'updated_at']
        if status not in (RunStatusEnum.PENDING, RunStatusEnum.RUNNING):
            self.finished_at = timezone.now()
            update_fields.append('finished_at')
        self.save(update_fields=update_fields)

    @property
    def is_finished(self) -> bool:
        return self.finished_at is not None


class LabModelMixin(TimeStampMixin, RunStatusMixin):
    """
    A base model mixin that combines:
    - `TimeStampMixin`
    - `RunStatusMixin`
    """

    class Meta:
        abstract = True
