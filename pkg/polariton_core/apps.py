from django.apps import AppConfig


class PolaritonCoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'polariton_core'
