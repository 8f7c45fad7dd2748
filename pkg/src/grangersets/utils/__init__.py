from .exceptions import (
    GrangerSetsError,
    IngestionError,
    ValidationError,
    ConfigurationError,
    NumericalError,
    SingularityError,
    RankDeficiencyError,
    ResamplingError,
    MonteCarloError,
    format_error,
    validate_positive,
    validate_in_range,
    validate_unique,
)
from .logging_config import setup_logging, get_logger, LogContext
from .rng import substream, derive_seed

__all__ = [
    "GrangerSetsError",
    "IngestionError",
    "ValidationError",
    "ConfigurationError",
    "NumericalError",
    "SingularityError",
    "RankDeficiencyError",
    "ResamplingError",
    "MonteCarloError",
    "format_error",
    "validate_positive",
    "validate_in_range",
    "validate_unique",
    "setup_logging",
    "get_logger",
    "LogContext",
    "substream",
    "derive_seed",
]
