from typing import Optional, Any, Dict, Iterable
import traceback
import logging

logger = logging.getLogger(__name__)


class GrangerSetsError(Exception):
    """Base class for every error raised by grangersets."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        cause: Optional[Exception] = None,
    ):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.cause = cause

    def __str__(self) -> str:
        result = self.message
        if self.details:
            details_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            result += f" ({details_str})"
        if self.cause:
            result += f"\nCaused by: {str(self.cause)}"
        return result


class IngestionError(GrangerSetsError):
    """A panel or partition file could not be read."""
    pass


class ValidationError(GrangerSetsError):
    """An argument or a data structure violates an invariant."""
    pass


class ConfigurationError(GrangerSetsError):
    """A configuration file or flag combination is invalid."""
    pass


class NumericalError(GrangerSetsError):
    """A covariance or regression computation cannot be carried out."""
    pass


class SingularityError(NumericalError):
    pass


class RankDeficiencyError(NumericalError):
    pass


class ResamplingError(GrangerSetsError):
    """Too many bootstrap replicates failed."""
    pass


class MonteCarloError(GrangerSetsError):
    """Too many Monte Carlo replicates failed."""
    pass


def format_error(error: Exception, include_traceback: bool = False) -> str:
    error_type = type(error).__name__
    error_msg = str(error)

    result = f"[{error_type}] {error_msg}"

    if include_traceback:
        tb = traceback.format_exc()
        result += f"\n\nTraceback:\n{tb}"

    return result


def validate_positive(value: Any, name: str):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValidationError(
            f"{name} must be a positive integer, got {value!r}",
            details={"parameter": name, "value": value},
        )


def validate_in_range(
    value: float,
    name: str,
    low: float,
    high: float,
    inclusive: bool = False,
):
    ok = low <= value <= high if inclusive else low < value < high
    if not ok:
        bounds = f"[{low}, {high}]" if inclusive else f"({low}, {high})"
        raise ValidationError(
            f"{name} must lie in {bounds}, got {value!r}",
            details={"parameter": name, "value": value},
        )


def validate_unique(values: Iterable[str], name: str):
    seen = set()
    duplicates = []
    for value in values:
        if value in seen and value not in duplicates:
            duplicates.append(value)
        seen.add(value)
    if duplicates:
        raise ValidationError(
            f"{name} contains duplicates: {', '.join(duplicates)}",
            details={"parameter": name, "duplicates": duplicates},
        )
