"""
Base Django settings for the mobility study project.
Common settings shared across all environments.
"""

from pathlib import Path

from decouple import Csv, config

from django_mobility_indicators.observability.logging import STRUCTURED_LOGGING_CONFIG

# Build paths
BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config("SECRET_KEY", default="insecure-example-key")
ALLOWED_HOSTS = config("ALLOWED_HOSTS", default="localhost,127.0.0.1", cast=Csv())

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "rest_framework",
    "django_mobility_indicators",
]

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Mobility indicators
MOBILITY_WINDOW_START = config("MOBILITY_WINDOW_START", default=2003, cast=int)
MOBILITY_WINDOW_END = config("MOBILITY_WINDOW_END", default=2015, cast=int)
MOBILITY_AGGREGATION_LEVEL = config("MOBILITY_AGGREGATION_LEVEL", default="country")
MOBILITY_TOP_K = 15
MOBILITY_CENTRALITY_WORKERS = config("MOBILITY_CENTRALITY_WORKERS", default=1, cast=int)
MOBILITY_OUTPUT_DIR = str(BASE_DIR / "output")
MOBILITY_REGIONS = {
    "nordic": ["DENMARK", "NORWAY", "SWEDEN"],
    "southern": ["ITALY", "PORTUGAL", "SPAIN"],
}

LOGGING = STRUCTURED_LOGGING_CONFIG
