from django.apps import AppConfig


class HarnackConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'harnack'
