from django.apps import AppConfig


class LiealgAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'liealg_app'
