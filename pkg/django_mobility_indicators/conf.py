"""Centralized configuration module for django-mobility-indicators package.

This module provides a single source of truth for all package settings,
loading from Django settings with sensible defaults and validation.
"""

import logging
from typing import Any, Dict, List, Optional

from decouple import config as env_config
from django.conf import settings

from .constants import (
    REGIONS,
    AggregationLevel,
    DefaultValues,
    OccurrenceCounting,
)
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)


class PackageConfig:
    """Centralized configuration for django-mobility-indicators package."""

    def __init__(self):
        """Initialize configuration with validation."""
        self._cache = {}
        self._validated = False
        self._load_and_validate()

    def _load_and_validate(self) -> None:
        """Load all configuration and validate settings."""
        if self._validated:
            return

        self._load_corpus_config()
        self._load_network_config()
        self._load_centrality_config()
        self._load_flow_config()
        self._load_output_config()
        self._load_environment_config()

        self._validate_critical_settings()
        self._validated = True

        logger.debug("django-mobility-indicators configuration loaded and validated")

    # ===========================================
    # CORPUS CONFIGURATION
    # ===========================================

    def _load_corpus_config(self) -> None:
        """Load ingestion and eligibility configuration."""
        self.WINDOW_START = self._get_setting("MOBILITY_WINDOW_START", DefaultValues.WINDOW_START)
        self.WINDOW_END = self._get_setting("MOBILITY_WINDOW_END", DefaultValues.WINDOW_END)
        self.CORPUS_YEAR_MIN = self._get_setting("MOBILITY_CORPUS_YEAR_MIN", DefaultValues.CORPUS_YEAR_MIN)
        self.CORPUS_YEAR_MAX = self._get_setting("MOBILITY_CORPUS_YEAR_MAX", DefaultValues.CORPUS_YEAR_MAX)
        self.ALIAS_MAP_PATH = self._get_setting("MOBILITY_ALIAS_MAP")
        self.STRICT_INGEST = self._get_setting("MOBILITY_STRICT_INGEST", False)

        level = self._get_setting("MOBILITY_AGGREGATION_LEVEL", AggregationLevel.COUNTRY.value)
        try:
            self.AGGREGATION_LEVEL = AggregationLevel.parse(level)
        except ValueError as e:
            raise ConfigurationError(
                f"Unknown aggregation level: {level}", setting="MOBILITY_AGGREGATION_LEVEL"
            ) from e
        self.PER_PAPER_MULTI = self._get_setting("MOBILITY_PER_PAPER_MULTI", False)

    # ===========================================
    # NETWORK CONFIGURATION
    # ===========================================

    def _load_network_config(self) -> None:
        """Load co-affiliation network configuration."""
        self.EDGE_THRESHOLD = self._get_setting("MOBILITY_EDGE_THRESHOLD", DefaultValues.EDGE_THRESHOLD)
        self.TOP_K = self._get_setting("MOBILITY_TOP_K", DefaultValues.TOP_K)
        self.ALL_PAIRS_EDGES = self._get_setting("MOBILITY_ALL_PAIRS_EDGES", False)

        counting = self._get_setting("MOBILITY_OCCURRENCE_COUNTING", OccurrenceCounting.PUBLICATIONS.value)
        try:
            self.OCCURRENCE_COUNTING = OccurrenceCounting(counting)
        except ValueError as e:
            raise ConfigurationError(
                f"Unknown occurrence counting: {counting}", setting="MOBILITY_OCCURRENCE_COUNTING"
            ) from e

        self.REGIONS: Dict[str, List[str]] = {name: list(countries) for name, countries in REGIONS.items()}
        for name, countries in (self._get_setting("MOBILITY_REGIONS", {}) or {}).items():
            self.REGIONS[name.lower()] = [country.strip().upper() for country in countries]

    # ===========================================
    # CENTRALITY CONFIGURATION
    # ===========================================

    def _load_centrality_config(self) -> None:
        """Load centrality configuration."""
        self.WEIGHTED_CENTRALITY = self._get_setting("MOBILITY_WEIGHTED_CENTRALITY", False)
        self.CENTRALITY_WORKERS = self._get_setting(
            "MOBILITY_CENTRALITY_WORKERS", DefaultValues.CENTRALITY_WORKERS
        )

    # ===========================================
    # FLOW CONFIGURATION
    # ===========================================

    def _load_flow_config(self) -> None:
        """Load flow matrix configuration."""
        self.FLOW_DEDUP_RESEARCHERS = self._get_setting("MOBILITY_FLOW_DEDUP_RESEARCHERS", False)
        self.FLOW_HALF_IN_SCOPE = self._get_setting("MOBILITY_FLOW_HALF_IN_SCOPE", False)

    # ===========================================
    # OUTPUT CONFIGURATION
    # ===========================================

    def _load_output_config(self) -> None:
        """Load output configuration.

        The output directory default is the only value read from the environment.
        """
        self.OUTPUT_DIR = env_config(
            "MOBILITY_OUTPUT_DIR",
            default=self._get_setting("MOBILITY_OUTPUT_DIR", DefaultValues.OUTPUT_DIR),
        )

    # ===========================================
    # ENVIRONMENT CONFIGURATION
    # ===========================================

    def _load_environment_config(self) -> None:
        """Load environment-specific configuration."""
        self.DEBUG = getattr(settings, "DEBUG", False)
        self.TESTING = getattr(settings, "TESTING", False)

        self.LOG_LEVEL = self._get_setting("MOBILITY_LOG_LEVEL", DefaultValues.LOG_LEVEL)
        self.SLOW_OPERATION_THRESHOLD = self._get_setting(
            "MOBILITY_SLOW_OPERATION_THRESHOLD", DefaultValues.SLOW_OPERATION_THRESHOLD
        )

        if self.DEBUG:
            self.LOG_LEVEL = "DEBUG"

        if self.TESTING:
            self._apply_testing_overrides()

    def _apply_testing_overrides(self) -> None:
        """Apply testing-specific configuration overrides."""
        self.CENTRALITY_WORKERS = 1

    # ===========================================
    # UTILITY METHODS
    # ===========================================

    def _get_setting(self, name: str, default: Any = None, required: bool = False) -> Any:
        """Get a setting value with caching."""
        if name in self._cache:
            return self._cache[name]

        value = getattr(settings, name, default)

        if required and value is None:
            raise ConfigurationError(f"Required setting {name} is not configured", setting=name)

        self._cache[name] = value
        return value

    def _validate_critical_settings(self) -> None:
        """Validate settings that must be properly configured."""
        errors = []

        for name in ("WINDOW_START", "WINDOW_END", "CORPUS_YEAR_MIN", "CORPUS_YEAR_MAX"):
            if not isinstance(getattr(self, name), int):
                errors.append(f"{name} must be an integer year")

        if not errors:
            if self.WINDOW_START > self.WINDOW_END:
                errors.append("WINDOW_START must not be after WINDOW_END")
            if self.CORPUS_YEAR_MIN > self.CORPUS_YEAR_MAX:
                errors.append("CORPUS_YEAR_MIN must not be after CORPUS_YEAR_MAX")

        if not isinstance(self.EDGE_THRESHOLD, int) or self.EDGE_THRESHOLD < 1:
            errors.append("EDGE_THRESHOLD must be a positive integer")

        if not isinstance(self.TOP_K, int) or self.TOP_K <= 0:
            errors.append("TOP_K must be a positive integer")

        if not isinstance(self.CENTRALITY_WORKERS, int) or self.CENTRALITY_WORKERS < 1:
            errors.append("CENTRALITY_WORKERS must be a positive integer")

        if self.LOG_LEVEL not in logging._nameToLevel:
            errors.append(f"LOG_LEVEL {self.LOG_LEVEL!r} is not a logging level")

        if errors:
            raise ConfigurationError(f"django-mobility-indicators configuration errors: {', '.join(errors)}")

    # ===========================================
    # CONFIGURATION ACCESS METHODS
    # ===========================================

    def get_region(self, name: str) -> Optional[List[str]]:
        """Get the country list of a named region."""
        return self.REGIONS.get(name.lower())

    def to_dict(self) -> Dict[str, Any]:
        """Export configuration as dictionary (for debugging/inspection)."""
        config_dict = {}
        for attr_name in dir(self):
            if attr_name.isupper():
                config_dict[attr_name] = getattr(self, attr_name)
        return config_dict


# Singleton instance
_config_instance: Optional[PackageConfig] = None


def get_config() -> PackageConfig:
    """Get the singleton configuration instance."""
    global _config_instance
    if _config_instance is None:
        _config_instance = PackageConfig()
    return _config_instance


def reload_config() -> PackageConfig:
    """Reload configuration (useful for testing)."""
    global _config_instance
    _config_instance = None
    return get_config()
