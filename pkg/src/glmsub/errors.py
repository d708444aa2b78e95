"""Exception hierarchy for glmsub.

All library errors derive from :class:`GlmsubError` so callers can catch
one base class.  Estimation failures (singular information, Newton
divergence) share the :class:`FitError` base; the two-stage driver and
the study runner treat any ``FitError`` in stage 1 as retryable.
"""

from __future__ import annotations


class GlmsubError(Exception):
    """Base class for all glmsub errors."""


class ValidationError(GlmsubError, ValueError):
    """Invalid input: bad shapes, out-of-range values, malformed configs."""


class ConfigError(ValidationError):
    """Configuration file error, carrying the offending key path."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class NumericOverflowError(GlmsubError):
    """A mean/cumulant evaluation produced a non-finite value."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message)


class DegenerateResponseError(GlmsubError):
    """Response vector cannot support the requested operation
    (e.g. a binary response with only one class present)."""


class FitError(GlmsubError):
    """Base class for maximum-likelihood estimation failures."""


class SingularInformationError(FitError):
    """An information (Hessian) matrix is singular and cannot be inverted."""


class NonConvergenceError(FitError):
    """Newton-Raphson failed to converge; carries the last iterate."""

    def __init__(self, message: str, theta=None, iterations: int = 0):
        self.theta = theta
        self.iterations = iterations
        super().__init__(message)


class StageOneError(GlmsubError):
    """All stage-1 pilot attempts failed; carries the last underlying error."""

    def __init__(self, attempts: int, last_error: Exception):
        self.attempts = attempts
        self.last_error = last_error
        super().__init__(
            f"stage-1 pilot estimation failed after {attempts} attempts: {last_error}"
        )
