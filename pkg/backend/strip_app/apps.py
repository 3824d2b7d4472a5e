from django.apps import AppConfig


class StripAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'strip_app'
