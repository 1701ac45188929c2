"""django-mobility-indicators: researcher-mobility indicators from disambiguated bibliographic records."""

__version__ = "0.1.0"
__license__ = "MIT"

# Services are exposed from ``django_mobility_indicators.services``; the package
# root stays import-light for worker processes.
__all__ = [
    "__version__",
    "__license__",
]
