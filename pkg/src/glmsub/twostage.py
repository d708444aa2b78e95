"""Two-stage subsampling drivers.

Stage 1 draws a pilot subsample of size r0 under the response-driven
initial probabilities and fits pilot estimates.  Stage 2 evaluates the
optimality-based probabilities at the pilot estimates, draws r more
rows, combines both subsamples (each row keeping the probability of the
stage that drew it) and fits every candidate model on the combined
sample by weighted maximum likelihood.

``two_stage`` shapes the stage-2 probabilities either under one sampling
model (``sampling_model=q``) or under the whole model set
(``sampling_model=None``, the model-robust rule).  Either way all Q
candidate models are fitted on the final combined sample.
``random_sampling_baseline`` skips the optimality step and reuses the
stage-1 probabilities for stage 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alias import draw_with_replacement
from .errors import FitError, NumericOverflowError, StageOneError, ValidationError
from .families import Family
from .fitting import FitResult, WeightedSample, fit_weighted_mle
from .models import ModelSet, build_design
from .probabilities import (
    DEFAULT_EPS,
    Criterion,
    ProbabilityVector,
    initial_probabilities,
    phi_model_robust,
    phi_single,
)

__all__ = [
    "TwoStageResult",
    "two_stage",
    "random_sampling_baseline",
    "pilot_probabilities",
]

DEFAULT_STAGE1_ATTEMPTS = 10


@dataclass(frozen=True)
class TwoStageResult:
    """Everything produced by one two-stage run.

    ``fits`` holds one :class:`FitResult` per candidate model, in model-set
    order.  ``combined_sample`` stores the raw covariate rows of the
    r0 + r selected points (design matrices per model are rebuilt from it
    with :func:`build_design`), together with the response values and the
    stage-specific selection probabilities.  The drawn row indices of both
    stages are kept for reproducibility.
    """

    fits: tuple[FitResult, ...]
    combined_sample: WeightedSample
    stage2_probs: ProbabilityVector
    stage1_indices: np.ndarray
    stage2_indices: np.ndarray


def _validate_sizes(models: ModelSet, n: int, r0: int, r: int) -> None:
    d_max = models.max_params
    if not (r >= r0 >= d_max + 1):
        raise ValidationError(
            f"need r >= r0 >= {d_max + 1} (largest model size + 1), got "
            f"r0={r0}, r={r}"
        )
    if n < d_max + 1:
        raise ValidationError(f"dataset has only {n} rows")


def _fit_all_models(
    family: Family,
    models: ModelSet,
    raw_rows: np.ndarray,
    y_rows: np.ndarray,
    probs: np.ndarray,
    population_size: int,
    tol: float,
    max_iter: int,
) -> tuple[FitResult, ...]:
    fits = []
    for spec in models.specs:
        sample = WeightedSample(build_design(spec, raw_rows), y_rows, probs)
        fits.append(
            fit_weighted_mle(
                family,
                sample,
                tol=tol,
                max_iter=max_iter,
                population_size=population_size,
            )
        )
    return tuple(fits)


def _stage1_pilots(
    family: Family,
    models: ModelSet,
    raw: np.ndarray,
    y: np.ndarray,
    init_probs: ProbabilityVector,
    r0: int,
    rng: np.random.Generator,
    fit_models: "list[int]",
    max_attempts: int,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, dict]:
    """Draw stage-1 rows and fit pilot estimates for the requested models,
    redrawing on estimation failure (up to ``max_attempts`` fresh draws)."""
    last_error: Exception | None = None
    for _ in range(max_attempts):
        idx = draw_with_replacement(init_probs, r0, rng)
        probs = init_probs.probs[idx]
        try:
            pilots = {}
            for q in fit_models:
                design = build_design(models.specs[q], raw[idx])
                sample = WeightedSample(design, y[idx], probs)
                pilots[q] = fit_weighted_mle(
                    family, sample, tol=tol, max_iter=max_iter
                ).theta
            return idx, pilots
        except (FitError, NumericOverflowError) as exc:
            last_error = exc
    raise StageOneError(max_attempts, last_error)


def _stage1_and_probabilities(
    family: Family,
    models: ModelSet,
    raw: np.ndarray,
    y: np.ndarray,
    r0: int,
    rng: np.random.Generator,
    criterion: Criterion,
    sampling_model: int | None,
    eps: float,
    tol: float,
    max_iter: int,
    max_stage1_attempts: int,
) -> tuple[ProbabilityVector, np.ndarray, ProbabilityVector]:
    """Stage 1 plus the stage-2 probability computation.

    Returns (initial probabilities, stage-1 row indices, stage-2
    probabilities)."""
    init_probs = initial_probabilities(family, y)
    fit_models = (
        list(range(len(models))) if sampling_model is None else [sampling_model]
    )
    idx1, pilots = _stage1_pilots(
        family,
        models,
        raw,
        y,
        init_probs,
        r0,
        rng,
        fit_models,
        max_stage1_attempts,
        tol,
        max_iter,
    )
    if sampling_model is None:
        stage2 = phi_model_robust(
            criterion,
            family,
            models,
            [pilots[q] for q in range(len(models))],
            raw,
            y,
            eps,
        )
    else:
        design_q = build_design(models.specs[sampling_model], raw)
        stage2 = phi_single(
            criterion, family, pilots[sampling_model], design_q, y, eps
        )
    return init_probs, idx1, stage2


def pilot_probabilities(
    family: Family,
    models: ModelSet,
    raw: np.ndarray,
    y: np.ndarray,
    r0: int,
    rng: np.random.Generator,
    criterion: "str | Criterion" = Criterion.MMSE,
    sampling_model: int | None = None,
    eps: float = DEFAULT_EPS,
    tol: float = 1e-4,
    max_iter: int = 100,
    max_stage1_attempts: int = DEFAULT_STAGE1_ATTEMPTS,
) -> ProbabilityVector:
    """Stage-2 probabilities only: draw a pilot subsample, fit the pilot
    estimate(s) and evaluate the optimality rule over the full data."""
    raw = np.atleast_2d(np.asarray(raw, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != raw.shape[0]:
        raise ValidationError(f"raw has {raw.shape[0]} rows but response has {y.shape[0]}")
    criterion = Criterion.optimality(criterion)
    if sampling_model is not None and not (0 <= sampling_model < len(models)):
        raise ValidationError(
            f"sampling_model must index one of the {len(models)} models"
        )
    _, _, stage2 = _stage1_and_probabilities(
        family,
        models,
        raw,
        y,
        r0,
        rng,
        criterion,
        sampling_model,
        eps,
        tol,
        max_iter,
        max_stage1_attempts,
    )
    return stage2


def two_stage(
    family: Family,
    models: ModelSet,
    raw: np.ndarray,
    y: np.ndarray,
    r0: int,
    r: int,
    rng: np.random.Generator,
    criterion: "str | Criterion" = Criterion.MMSE,
    sampling_model: int | None = None,
    eps: float = DEFAULT_EPS,
    tol: float = 1e-4,
    max_iter: int = 100,
    max_stage1_attempts: int = DEFAULT_STAGE1_ATTEMPTS,
) -> TwoStageResult:
    """Run the two-stage optimal subsampling procedure.

    Parameters
    ----------
    family : Family
        Response family.
    models : ModelSet
        Candidate models; all are fitted on the combined sample.
    raw, y : ndarray
        Full data: raw covariates (N x p) and responses (N).
    r0, r : int
        Stage-1 and stage-2 subsample sizes, ``r >= r0 >= d_max + 1``.
    rng : numpy.random.Generator
        Source of randomness; results are deterministic given its state.
    criterion : Criterion
        ``mMSE`` (A-optimal) or ``mVc`` (L-optimal).
    sampling_model : int or None
        Index of the model shaping the stage-2 probabilities; ``None``
        averages over the whole set (model-robust sampling).
    eps : float
        Residual floor for the probability formulas.
    max_stage1_attempts : int
        Fresh stage-1 draws to try when pilot estimation fails before
        raising :class:`StageOneError`.

    Returns
    -------
    TwoStageResult
    """
    raw = np.atleast_2d(np.asarray(raw, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = raw.shape[0]
    if y.shape[0] != n:
        raise ValidationError(f"raw has {n} rows but response has {y.shape[0]}")
    _validate_sizes(models, n, r0, r)
    criterion = Criterion.optimality(criterion)
    if sampling_model is not None and not (0 <= sampling_model < len(models)):
        raise ValidationError(
            f"sampling_model must index one of the {len(models)} models"
        )

    init_probs, idx1, stage2 = _stage1_and_probabilities(
        family,
        models,
        raw,
        y,
        r0,
        rng,
        criterion,
        sampling_model,
        eps,
        tol,
        max_iter,
        max_stage1_attempts,
    )

    idx2 = draw_with_replacement(stage2, r, rng)
    combined_idx = np.concatenate([idx1, idx2])
    combined_probs = np.concatenate(
        [init_probs.probs[idx1], stage2.probs[idx2]]
    )
    raw_rows = raw[combined_idx]
    y_rows = y[combined_idx]
    fits = _fit_all_models(
        family, models, raw_rows, y_rows, combined_probs, n, tol, max_iter
    )
    return TwoStageResult(
        fits=fits,
        combined_sample=WeightedSample(raw_rows, y_rows, combined_probs),
        stage2_probs=stage2,
        stage1_indices=idx1,
        stage2_indices=idx2,
    )


def random_sampling_baseline(
    family: Family,
    models: ModelSet,
    raw: np.ndarray,
    y: np.ndarray,
    r0: int,
    r: int,
    rng: np.random.Generator,
    tol: float = 1e-4,
    max_iter: int = 100,
) -> TwoStageResult:
    """Two-stage run without the optimality step: simple random sampling
    with replacement (uniform 1/N in both stages), then every candidate
    model is fitted on the combined sample."""
    raw = np.atleast_2d(np.asarray(raw, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = raw.shape[0]
    if y.shape[0] != n:
        raise ValidationError(f"raw has {n} rows but response has {y.shape[0]}")
    _validate_sizes(models, n, r0, r)
    family.validate_response(y)

    init_probs = ProbabilityVector(np.full(n, 1.0 / n), Criterion.UNIFORM)
    idx1 = draw_with_replacement(init_probs, r0, rng)
    idx2 = draw_with_replacement(init_probs, r, rng)
    combined_idx = np.concatenate([idx1, idx2])
    combined_probs = init_probs.probs[combined_idx]
    raw_rows = raw[combined_idx]
    y_rows = y[combined_idx]
    fits = _fit_all_models(
        family, models, raw_rows, y_rows, combined_probs, n, tol, max_iter
    )
    return TwoStageResult(
        fits=fits,
        combined_sample=WeightedSample(raw_rows, y_rows, combined_probs),
        stage2_probs=init_probs,
        stage1_indices=idx1,
        stage2_indices=idx2,
    )
