"""Structured logging formatters for pipeline operations."""

import logging
import traceback
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from pythonjsonlogger import jsonlogger

# Context attributes a pipeline log record may carry.
PIPELINE_CONTEXT_FIELDS = ("stage", "author_id", "level", "artifact", "line_number", "entity")


def _package_version() -> str:
    from ... import __version__

    return __version__


class StructuredJsonFormatter(jsonlogger.JsonFormatter):
    """JSON formatter with pipeline context."""

    def add_fields(self, log_record: Dict[str, Any], record: logging.LogRecord, message_dict: Dict[str, Any]) -> None:
        """Add custom fields to log record."""
        super().add_fields(log_record, record, message_dict)

        log_record["timestamp"] = datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
        log_record["service"] = "django-mobility-indicators"
        log_record["version"] = _package_version()
        log_record["levelname"] = record.levelname

        for name in PIPELINE_CONTEXT_FIELDS:
            if hasattr(record, name):
                log_record[name] = getattr(record, name)

        if record.exc_info:
            log_record["exception"] = {
                "type": record.exc_info[0].__name__ if record.exc_info[0] else None,
                "message": str(record.exc_info[1]) if record.exc_info[1] else None,
                "traceback": traceback.format_exception(*record.exc_info),
            }

        if hasattr(record, "duration_ms"):
            log_record["duration_ms"] = record.duration_ms

        if hasattr(record, "_custom_fields"):
            log_record.update(record._custom_fields)

        if "message" not in log_record:
            log_record["message"] = record.getMessage()


class PipelineLogFormatter(logging.Formatter):
    """Human-readable formatter for pipeline runs."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record for human readability."""
        timestamp = datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S")
        level = record.levelname.ljust(8)

        custom = getattr(record, "_custom_fields", {})
        context_parts = []
        for name in PIPELINE_CONTEXT_FIELDS:
            value = custom.get(name, getattr(record, name, None))
            if value is not None:
                context_parts.append(f"{name}:{value}")
        context_str = f"[{' '.join(context_parts)}] " if context_parts else ""

        perf_info = ""
        duration_ms = custom.get("duration_ms", getattr(record, "duration_ms", None))
        if duration_ms is not None:
            perf_info = f" ({duration_ms:.2f}ms)"

        formatted = f"{timestamp} {level} {record.name}: {context_str}{record.getMessage()}{perf_info}"

        if record.exc_info:
            formatted += "\n" + self.formatException(record.exc_info)

        return formatted


class PipelineLogger:
    """Logger wrapper that attaches pipeline context to every record."""

    def __init__(self, name: str, **context):
        self.logger = logging.getLogger(name)
        self.context = context

    def bind(self, **context) -> "PipelineLogger":
        """Return a logger carrying additional context."""
        bound = PipelineLogger(self.logger.name, **{**self.context, **context})
        return bound

    def log_stage(self, stage: str, status: str, duration_ms: Optional[float] = None, **context) -> None:
        """Log a pipeline stage transition."""
        level = logging.ERROR if status == "failed" else logging.INFO
        log_context = {"stage": stage, **context}
        if duration_ms is not None:
            log_context["duration_ms"] = duration_ms
        self._log(level, f"Stage {status}: {stage}", **log_context)

    def log_artifact(self, artifact: str, rows: int, **context) -> None:
        """Log an artifact written to the output directory."""
        self._log(logging.INFO, f"Wrote {artifact} ({rows} rows)", artifact=artifact, rows=rows, **context)

    def log_data_warning(self, message: str, **context) -> None:
        """Log a recoverable problem in the input data."""
        self._log(logging.WARNING, message, data_warning=True, **context)

    def _log(self, severity: int, message: str, **context) -> None:
        merged = {**self.context, **context}
        self.logger.log(severity, message, extra={"_custom_fields": merged})


STRUCTURED_LOGGING_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "json": {"()": StructuredJsonFormatter, "format": "%(levelname)s %(name)s %(message)s"},
        "pipeline": {
            "()": PipelineLogFormatter,
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "json",
        },
        "console_readable": {
            "class": "logging.StreamHandler",
            "formatter": "pipeline",
        },
    },
    "loggers": {
        "django_mobility_indicators": {
            "handlers": ["console_readable"],
            "level": "INFO",
            "propagate": False,
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
}
