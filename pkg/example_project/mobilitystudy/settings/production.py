"""Batch settings: JSON logs and parallel centrality."""

from decouple import config

from .base import *  # noqa: F403

DEBUG = False

MOBILITY_CENTRALITY_WORKERS = config("MOBILITY_CENTRALITY_WORKERS", default=4, cast=int)

LOGGING = {
    **LOGGING,  # noqa: F405
    "loggers": {
        "django_mobility_indicators": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}
