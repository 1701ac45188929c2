"""Development settings: readable logs on the console."""

from .base import *  # noqa: F403

DEBUG = True

LOGGING = {
    **LOGGING,  # noqa: F405
    "loggers": {
        "django_mobility_indicators": {
            "handlers": ["console_readable"],
            "level": "DEBUG",
            "propagate": False,
        },
    },
}
