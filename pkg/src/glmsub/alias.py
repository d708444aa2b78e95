"""Weighted sampling with replacement via the alias method.

Vose's variant of the Walker alias table: O(N) construction, O(1) per
draw.  See http://www.keithschwarz.com/darts-dice-coins/ for a
derivation.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

__all__ = ["AliasSampler", "draw_with_replacement"]


class AliasSampler:
    """Alias table over a discrete distribution on ``{0, ..., N-1}``.

    Weights need not be normalized; they must be non-negative with a
    positive sum.  Zero-weight entries are valid and are never drawn.
    """

    def __init__(self, weights):
        weights = getattr(weights, "probs", weights)
        weights = np.asarray(weights, dtype=float).ravel()
        if weights.size == 0:
            raise ValidationError("cannot build a sampler over zero outcomes")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValidationError("weights must be finite and non-negative")
        total = float(weights.sum())
        if total <= 0:
            raise ValidationError("weights must have a positive sum")

        n = weights.size
        scaled = weights * (n / total)
        accept = np.ones(n)
        alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            accept[s] = scaled[s]
            alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            if scaled[g] < 1.0:
                small.append(g)
            else:
                large.append(g)
        # Leftovers are 1 up to rounding error.
        for q in (small, large):
            for g in q:
                accept[g] = 1.0
                alias[g] = g

        self._accept = accept
        self._alias = alias
        self.n = n

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` i.i.d. indices; deterministic given the generator
        state (one ``integers`` call and one ``random`` call)."""
        k = rng.integers(0, self.n, size=size)
        u = rng.random(size)
        return np.where(u < self._accept[k], k, self._alias[k])


def draw_with_replacement(probs, r: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``r`` indices i.i.d. from a probability vector (or anything with
    a ``probs`` attribute) with replacement."""
    if r < 1:
        raise ValidationError(f"subsample size must be at least 1, got {r}")
    return AliasSampler(probs).draw(rng, int(r))
