"""Logging package for structured logging."""

from .formatters import STRUCTURED_LOGGING_CONFIG, PipelineLogFormatter, PipelineLogger, StructuredJsonFormatter

__all__ = ["STRUCTURED_LOGGING_CONFIG", "PipelineLogFormatter", "PipelineLogger", "StructuredJsonFormatter"]
