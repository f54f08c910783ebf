from django.apps import AppConfig


class BogoliubovConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'bogoliubov'
