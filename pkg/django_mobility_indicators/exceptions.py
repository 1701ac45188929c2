"""Custom exceptions for django-mobility-indicators package."""

from typing import Any, Dict, Optional


class MobilityIndicatorsError(Exception):
    """Base exception for all django-mobility-indicators errors."""

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.code = code or "MOBILITY_INDICATORS_ERROR"
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationError(MobilityIndicatorsError):
    """Exception raised for configuration errors."""

    def __init__(
        self,
        message: str,
        setting: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.setting = setting
        details = details or {}
        if setting:
            details["setting"] = setting
        super().__init__(message, code="CONFIGURATION_ERROR", details=details)


class CorpusError(MobilityIndicatorsError):
    """Exception raised for a bad input record."""

    default_code = "CORPUS_ERROR"

    def __init__(
        self,
        message: str,
        line_number: Optional[int] = None,
        field: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.line_number = line_number
        self.field = field
        details = details or {}
        if line_number is not None:
            details["line_number"] = line_number
        if field:
            details["field"] = field
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message, code=self.default_code, details=details)


class RecordParseError(CorpusError):
    """Malformed syntax or a value of the wrong type."""

    default_code = "RECORD_PARSE_ERROR"


class SchemaError(CorpusError):
    """A required field is missing."""

    default_code = "SCHEMA_ERROR"


class RecordValidationError(CorpusError):
    """A well-formed value violates a record invariant."""

    default_code = "RECORD_VALIDATION_ERROR"


class ContractViolationError(MobilityIndicatorsError):
    """An operation was called outside its precondition."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="CONTRACT_VIOLATION", details=details)


class DataInconsistencyError(MobilityIndicatorsError):
    """Inputs that cannot all be true at once."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="DATA_INCONSISTENCY", details=details)


class EmptyStratumError(MobilityIndicatorsError):
    """An indicator was requested over an empty paper set."""

    def __init__(self, message: str = "empty stratum", stratum: Optional[str] = None):
        details = {}
        if stratum:
            details["stratum"] = stratum
        super().__init__(message, code="EMPTY_STRATUM", details=details)


class FlowError(MobilityIndicatorsError):
    """Exception raised while computing flow shares."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None, code: str = "FLOW_ERROR"):
        super().__init__(message, code=code, details=details)


class NoMobilityEventsError(FlowError):
    """Exception raised when a flow matrix carries no weight."""

    def __init__(self, message: str = "no mobility events in scope"):
        super().__init__(message, code="NO_MOBILITY_EVENTS")


class MissingArtifactError(MobilityIndicatorsError):
    """Exception raised when a stage's input artifact has not been produced."""

    def __init__(self, artifact: str, stage: str):
        self.artifact = artifact
        self.stage = stage
        message = f"missing artifact {artifact}; run `mobility {stage}` first"
        super().__init__(message, code="MISSING_ARTIFACT", details={"artifact": artifact, "stage": stage})
