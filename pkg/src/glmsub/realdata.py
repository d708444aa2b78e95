"""Real-data runs: single subsample fits and the repeated-subsampling
comparison study.

Because the true parameters are unknown on real data, strategies are
compared by the summed SMSE over all candidate models, each measured
against its own full-data MLE and aggregated over repeated subsampling
runs on the fixed dataset.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RealDataConfig
from .errors import (
    DegenerateResponseError,
    FitError,
    NumericOverflowError,
    StageOneError,
)
from .families import Family
from .fitting import WeightedSample, fit_weighted_mle
from .models import ModelSet, build_design
from .simulate import smse
from .twostage import TwoStageResult, random_sampling_baseline, two_stage

__all__ = ["SsmseRecord", "full_data_mles", "run_subsample", "run_ssmse_study"]


@dataclass(frozen=True)
class SsmseRecord:
    """Summed SMSE of one strategy at one subsample size."""

    scenario: str
    r: int
    ssmse: float
    n_failed: int


def full_data_mles(family: Family, models: ModelSet, raw: np.ndarray, y: np.ndarray):
    """Unweighted MLE of every candidate model on the whole dataset."""
    mles = []
    for spec in models.specs:
        sample = WeightedSample(build_design(spec, raw), y, np.ones(len(y)))
        mles.append(fit_weighted_mle(family, sample, max_iter=200).theta)
    return mles


def run_subsample(
    config: RealDataConfig, raw: np.ndarray, y: np.ndarray, rng: np.random.Generator
) -> TwoStageResult:
    """One two-stage run under the configured sampling model (or the
    model-robust rule when none is set)."""
    return two_stage(
        config.family,
        config.model_set,
        raw,
        y,
        config.r0,
        config.r,
        rng,
        criterion=config.criterion,
        sampling_model=config.sampling_model,
        eps=config.eps,
    )


def _scenario_labels(models: ModelSet) -> tuple[str, ...]:
    q = len(models)
    return ("random",) + tuple(f"optimal-{k + 1}" for k in range(q)) + ("model-robust",)


# Worker state for process pools: the dataset is installed once per worker
# instead of being pickled into every task.
_WORKER: dict = {}


def _init_worker(config: RealDataConfig, raw: np.ndarray, y: np.ndarray):
    _WORKER["config"] = config
    _WORKER["raw"] = raw
    _WORKER["y"] = y


def _ssmse_replicate(args) -> dict:
    config, raw, y, m = (
        _WORKER.get("config"),
        _WORKER.get("raw"),
        _WORKER.get("y"),
        args,
    )
    labels = _scenario_labels(config.model_set)
    out: dict = {}
    for j, r in enumerate(config.r_grid):
        for s, label in enumerate(labels):
            rng = np.random.default_rng(
                np.random.SeedSequence([config.master_seed, m, 1 + s, j])
            )
            try:
                if label == "random":
                    result = random_sampling_baseline(
                        config.family, config.model_set, raw, y, config.r0, r, rng
                    )
                else:
                    result = two_stage(
                        config.family,
                        config.model_set,
                        raw,
                        y,
                        config.r0,
                        r,
                        rng,
                        criterion=config.criterion,
                        sampling_model=None if label == "model-robust" else s - 1,
                        eps=config.eps,
                    )
                out[(label, r)] = [fit.theta for fit in result.fits]
            except (FitError, StageOneError, NumericOverflowError, DegenerateResponseError):
                out[(label, r)] = None
    return out


def run_ssmse_study(
    config: RealDataConfig, raw: np.ndarray, y: np.ndarray, threads: int = 1
) -> "list[SsmseRecord]":
    """Repeated-subsampling comparison on a fixed dataset.

    Every strategy (random, per-model optimal, model-robust) is run
    ``replicates`` times at each subsample size; each run fits all Q
    candidate models and the record aggregates the summed SMSE against
    the full-data MLEs.  Output is deterministic in the master seed and
    independent of ``threads``.
    """
    mles = full_data_mles(config.family, config.model_set, raw, y)
    ms = list(range(config.n_replicates))
    if threads > 1:
        with ProcessPoolExecutor(
            max_workers=threads, initializer=_init_worker, initargs=(config, raw, y)
        ) as pool:
            replicates = list(pool.map(_ssmse_replicate, ms))
    else:
        _init_worker(config, raw, y)
        try:
            replicates = [_ssmse_replicate(m) for m in ms]
        finally:
            _WORKER.clear()

    records = []
    q = len(config.model_set)
    for label in _scenario_labels(config.model_set):
        for r in config.r_grid:
            cells = [rep[(label, r)] for rep in replicates]
            good = [c for c in cells if c is not None]
            n_failed = len(cells) - len(good)
            if good:
                total = sum(
                    smse(np.array([thetas[k] for thetas in good]), mles[k])
                    for k in range(q)
                )
            else:
                total = float("nan")
            records.append(
                SsmseRecord(scenario=label, r=r, ssmse=float(total), n_failed=n_failed)
            )
    return records
