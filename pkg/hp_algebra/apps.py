from django.apps import AppConfig


class HpAlgebraConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'hp_algebra'
