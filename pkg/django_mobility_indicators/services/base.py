"""Base service class with common patterns for all services."""

import logging
import math
import time
from functools import wraps
from typing import Any, Iterable, Optional

from ..conf import get_config
from ..constants import AggregationLevel
from ..exceptions import ConfigurationError, ContractViolationError

logger = logging.getLogger(__name__)


def log_execution(level: int = logging.DEBUG):
    """Decorator to log method execution and its duration.

    Args:
        level: Logging level (default DEBUG)

    """

    def decorator(func):
        @wraps(func)
        def wrapper(self, *args, **kwargs):
            method_name = f"{self.__class__.__name__}.{func.__name__}"
            logger.log(level, f"Executing {method_name}")
            started = time.perf_counter()

            try:
                result = func(self, *args, **kwargs)
            except Exception as e:
                logger.error(f"Error in {method_name}: {e}")
                raise

            self.log_performance(method_name, time.perf_counter() - started)
            return result

        return wrapper

    return decorator


class BaseService:
    """Base service class providing common patterns and utilities."""

    def __init__(self):
        """Initialize base service."""
        self.logger = logging.getLogger(f"{self.__module__}.{self.__class__.__name__}")

    @property
    def config(self):
        """Current package configuration; follows reload_config()."""
        return get_config()

    @property
    def log_level(self) -> int:
        return getattr(logging, self.config.LOG_LEVEL)

    # ===========================================
    # VALIDATION PATTERNS
    # ===========================================

    def validate_positive_int(self, value: Any, field_name: str) -> int:
        """Validate that a value is a positive integer.

        Raises:
            ConfigurationError: If value is not a positive integer

        """
        if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
            raise ConfigurationError(f"{field_name} must be a positive integer", setting=field_name)
        return value

    def validate_probability(self, value: float, field_name: str) -> float:
        """Validate that a value lies in [0, 1]."""
        if not 0.0 <= value <= 1.0:
            raise ConfigurationError(f"{field_name} must lie in [0, 1], got {value}", setting=field_name)
        return value

    def validate_level(self, level: str) -> AggregationLevel:
        try:
            return AggregationLevel.parse(level)
        except ValueError as e:
            raise ContractViolationError(f"Unknown aggregation level: {level}") from e

    # ===========================================
    # LOGGING UTILITIES
    # ===========================================

    def log_operation(self, operation: str, severity: Optional[int] = None, **context) -> None:
        """Log an operation with context.

        Args:
            operation: Description of the operation
            severity: Logging level (uses configured level if None)
            **context: Additional context for logging

        """
        severity = severity or self.log_level

        if context:
            message = f"{operation} - Context: {context}"
        else:
            message = operation

        self.logger.log(severity, message, extra={"_custom_fields": context})

    def log_performance(self, operation: str, duration: float) -> None:
        """Log performance metrics.

        Args:
            operation: Operation name
            duration: Duration in seconds

        """
        slow_threshold = self.config.SLOW_OPERATION_THRESHOLD
        if duration > slow_threshold:
            self.logger.warning(f"Slow operation: {operation} took {duration:.2f}s")
        else:
            self.logger.debug(f"Operation: {operation} took {duration:.3f}s")

    # ===========================================
    # UTILITY METHODS
    # ===========================================

    def safe_divide(self, numerator: float, denominator: float, default: float = 0.0) -> float:
        """Safely divide two numbers, returning default if denominator is zero."""
        if denominator == 0:
            return default
        return numerator / denominator

    def fsum(self, values: Iterable[float]) -> float:
        """Order-stable exact float sum."""
        return math.fsum(values)
