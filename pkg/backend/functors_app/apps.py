from django.apps import AppConfig


class FunctorsAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'functors_app'
