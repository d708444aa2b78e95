"""Exponential-family response distributions with canonical links.

Two families are supported: logistic regression (Bernoulli response,
logit link) and Poisson regression (log link).  Both have dispersion
fixed at one and a canonical link, so the natural parameter equals the
linear predictor eta and each family is fully described by three scalar
functions of eta:

* ``mean(eta)``     -- inverse link, the conditional mean of y,
* ``cumulant(eta)`` -- the log-normalizer whose derivative is the mean,
* ``weight(eta)``   -- the information weight var(y | eta) entering
  x x^T sums (``mu (1 - mu)`` for logistic, ``mu`` for Poisson).

All three operate elementwise on arrays and are overflow-safe where the
naive formula is not.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from .errors import NumericOverflowError, ValidationError

__all__ = ["Family", "Logistic", "Poisson", "get_family"]


class Family(ABC):
    """A GLM response family with canonical link."""

    name: str

    @abstractmethod
    def mean(self, eta: np.ndarray) -> np.ndarray:
        """Conditional mean of the response at linear predictor ``eta``."""

    @abstractmethod
    def cumulant(self, eta: np.ndarray) -> np.ndarray:
        """Log-normalizer evaluated at ``eta`` (its gradient is ``mean``)."""

    @abstractmethod
    def weight(self, eta: np.ndarray) -> np.ndarray:
        """Information weight var(y | eta) at ``eta``."""

    @abstractmethod
    def validate_response(self, y: np.ndarray) -> None:
        """Raise :class:`ValidationError` if ``y`` is invalid for the family."""

    @abstractmethod
    def sample_response(self, mu: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw responses with conditional means ``mu``."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"

    def __eq__(self, other) -> bool:
        return type(self) is type(other)

    def __hash__(self) -> int:
        return hash(type(self))


class Logistic(Family):
    """Bernoulli response with logit link: mean(eta) = 1 / (1 + exp(-eta))."""

    name = "logistic"

    def mean(self, eta: np.ndarray) -> np.ndarray:
        # Branch on the sign of eta so exp() is only evaluated on
        # non-positive arguments; the naive formula overflows near |eta|~700.
        eta = np.asarray(eta, dtype=float)
        out = np.empty_like(eta)
        pos = eta >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
        expe = np.exp(eta[~pos])
        out[~pos] = expe / (1.0 + expe)
        return out

    def cumulant(self, eta: np.ndarray) -> np.ndarray:
        # log(1 + exp(eta)), overflow-safe.
        return np.logaddexp(0.0, np.asarray(eta, dtype=float))

    def weight(self, eta: np.ndarray) -> np.ndarray:
        mu = self.mean(eta)
        return mu * (1.0 - mu)

    def validate_response(self, y: np.ndarray) -> None:
        y = np.asarray(y)
        bad = ~np.isin(y, (0, 1))
        if np.any(bad):
            idx = int(np.flatnonzero(bad)[0])
            raise ValidationError(
                f"logistic response must be 0/1; found {y.flat[idx]!r} at index {idx}"
            )

    def sample_response(self, mu: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return rng.binomial(1, mu)


class Poisson(Family):
    """Poisson response with log link: mean(eta) = exp(eta)."""

    name = "poisson"

    def mean(self, eta: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            lam = np.exp(np.asarray(eta, dtype=float))
        if not np.all(np.isfinite(lam)):
            idx = int(np.flatnonzero(~np.isfinite(np.atleast_1d(lam)))[0])
            raise NumericOverflowError(
                f"Poisson mean overflowed at index {idx} (eta="
                f"{np.atleast_1d(eta)[idx]!r})",
                index=idx,
            )
        return lam

    def cumulant(self, eta: np.ndarray) -> np.ndarray:
        # For the log link the cumulant equals the mean.
        return self.mean(eta)

    def weight(self, eta: np.ndarray) -> np.ndarray:
        return self.mean(eta)

    def validate_response(self, y: np.ndarray) -> None:
        y = np.asarray(y)
        bad = (y < 0) | (y != np.floor(y))
        if np.any(bad):
            idx = int(np.flatnonzero(bad)[0])
            raise ValidationError(
                f"Poisson response must be a non-negative integer; found "
                f"{y.flat[idx]!r} at index {idx}"
            )

    def sample_response(self, mu: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if not np.all(np.isfinite(mu)):
            raise NumericOverflowError("Poisson response mean is non-finite")
        return rng.poisson(mu)


_FAMILIES = {"logistic": Logistic, "poisson": Poisson}


def get_family(name: str) -> Family:
    """Resolve a family name (``"logistic"`` or ``"poisson"``) to an instance."""
    try:
        return _FAMILIES[name.lower()]()
    except KeyError:
        raise ValidationError(
            f"unknown family {name!r}; expected one of {sorted(_FAMILIES)}"
        ) from None
