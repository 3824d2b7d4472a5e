from django.apps import AppConfig


class RootsAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'roots_app'
