import os

from celery import Celery


# set the default django settings module for the celery app
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'harnack_lab.settings')

app = Celery('harnack_lab')

# experiment runs are dispatched as tasks; with CELERY_TASK_ALWAYS_EAGER (the
# default) they execute in-process, which is what the `lab` command relies on
app.config_from_object('django.conf:settings', namespace='CELERY')

# picks up `experiments.tasks`
app.autodiscover_tasks()
