"""Django app configuration for django-mobility-indicators."""

from django.apps import AppConfig


class DjangoMobilityIndicatorsConfig(AppConfig):
    """Configuration class for the mobility indicators application."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "django_mobility_indicators"
    verbose_name = "Researcher Mobility Indicators"
