import os

from django.apps import AppConfig
from django.conf import settings


class ExactAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'exact_app'

    def ready(self):
        # Initialize compute logging when app is ready
        from .compute_logger import configure_compute_logging

        config = getattr(settings, 'KMFORGE_COMPUTE_LOGGING', {})

        # Ensure logs directory exists before the handler opens the file
        log_file = config.get('log_file')
        if config.get('log_to_file', True) and log_file and not os.path.isabs(log_file):
            log_dir = os.path.join(settings.BASE_DIR, os.path.dirname(log_file))
            os.makedirs(log_dir, exist_ok=True)

        configure_compute_logging(config)
