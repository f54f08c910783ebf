from django.apps import AppConfig


class ExpdataConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'expdata'
