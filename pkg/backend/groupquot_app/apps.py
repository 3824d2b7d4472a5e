from django.apps import AppConfig


class GroupquotAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'groupquot_app'
