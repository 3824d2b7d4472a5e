from django.apps import AppConfig


class CartanAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cartan_app'
