"""Observability package for django-mobility-indicators."""
