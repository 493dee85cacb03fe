"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class GqmeError(Exception):
    """Base class for all package errors."""


class ValidationError(GqmeError, ValueError):
    """Input violates a documented precondition."""


class DimensionError(ValidationError):
    """Array shape does not match what the operation needs."""


class SeriesFormatError(GqmeError):
    """A series or circuit file could not be parsed.

    ``record`` is the 1-based line number of the offending record, or
    ``None`` when the problem is in the header or the file as a whole.
    """

    def __init__(self, message: str, record: int | None = None):
        self.record = record
        if record is not None:
            message = f"record {record}: {message}"
        super().__init__(message)


class NonUniformGridError(SeriesFormatError):
    pass


class ConvergenceError(GqmeError):
    """Fock truncation is too small for the requested tolerance."""


class SingularSystemError(GqmeError):
    """Linear solve in the Volterra step is too ill-conditioned; reduce dt."""
