import os
from pathlib import Path
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / ".env")  # load backend/.env

SECRET_KEY = os.getenv("SECRET_KEY", "dev-insecure-fallback-change-me")
DEBUG = os.getenv("DEBUG", "True").lower() == "true"

ALLOWED_HOSTS: list[str] = []

INSTALLED_APPS = [
    # Third-party
    "rest_framework",
    # Project apps
    "exact_app",
    "cartan_app",
    "roots_app",
    "liealg_app",
    "enveloping_app",
    "groupquot_app",
    "strip_app",
    "functors_app",
    "oracles_app",
    "reports_app",
]

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
}

# Engine tunables; every key has a built-in default in exact_app.conf
KMFORGE = {
    "ORDER_CAP": int(os.getenv("KMFORGE_DEFAULT_ORDER_CAP", 10**6)),
    "CENSUS_CAP": 10**6,
    "POWER_SCAN_CAP": 729,
    "WITNESS_MAX_HEIGHT": 8,
    "REPORT_SCHEMA": "kmforge.report/1",
    "RANDOM_SEED": int(os.getenv("KMFORGE_RANDOM_SEED", 20240607)),
}

# Compute logging configuration
KMFORGE_COMPUTE_LOGGING = {
    'slow_threshold_ms': int(os.getenv("KMFORGE_SLOW_MS", 500)),  # Log operations slower than this
    'log_all': os.getenv("KMFORGE_LOG_ALL", "False").lower() == "true",
    'log_to_file': os.getenv("KMFORGE_LOG_TO_FILE", "True").lower() == "true",
    'log_file': 'logs/kmforge_compute.log',  # relative to BASE_DIR
    'include_params': True,
    'redact_fields': ['password', 'token', 'secret', 'key'],
}
