from django.apps import AppConfig


class LandisConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'landis'
