from django.apps import AppConfig


class OraclesAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'oracles_app'
