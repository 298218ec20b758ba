from django.apps import AppConfig


class SmpConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'smp'
    verbose_name = 'Strong maximum principle'
