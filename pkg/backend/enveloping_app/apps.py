from django.apps import AppConfig


class EnvelopingAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'enveloping_app'
