"""YAML run configuration.

One file describes one run.  Common keys::

    mode: simulate            # simulate | subsample | probabilities | ssmse
    family: logistic          # logistic | poisson
    criterion: mMSE           # optional; mMSE (default) or mVc
    eps: 1.0e-6               # optional residual floor (default 1e-6)
    seed: 20260810            # optional master seed (default 0)
    r0: 100                   # stage-1 subsample size

Simulation mode (synthetic data regenerated each replicate)::

    population: 10000         # N
    replicates: 200           # M
    r_grid: [100, 200, 400]   # stage-2 sizes, ascending
    covariates:
      distribution: normal    # normal | exponential | uniform
      dimension: 2
      mean: [0.0, 0.0]        # normal only
      covariance: [[1.5, 0.0], [0.0, 1.5]]
      # rate: 1.732           # exponential only
    model_set:
      quadratic_over: [1, 2]  # 1-based covariate positions; default: all
      # alpha: [0.25, 0.25, 0.25, 0.25]   # default: uniform
    data_generating:
      quadratic_terms: []     # subset of quadratic_over (1-based)
      theta: [-1.0, 0.5, 0.1]

Real-data modes (subsample | probabilities | ssmse) replace the three
synthetic blocks with a dataset block::

    dataset:
      path: skin.csv
      response: is_skin
      covariates: [red, green, blue]
      continuous: [red, green, blue]    # default: all covariates
      scaling:                          # default: none
        red: standardize                # none | standardize | range-to-unit
    model_set:
      quadratic_over: [red, green, blue]  # names; default: all continuous
    sampling_model: model-robust    # or a 1-based model index
    r: 500                    # subsample / probabilities
    r_grid: [200, 400]        # ssmse
    replicates: 100           # ssmse

The candidate model set is always the full main-effects model plus every
combination of squared terms over the ``quadratic_over`` covariates.
Unknown keys anywhere are rejected, with the offending key path reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .datasets import CovariateColumn, DatasetDescriptor, Scaling
from .errors import ConfigError
from .families import Family, get_family
from .models import ModelSet, ModelSpec, enumerate_quadratic_models, validate_alpha
from .probabilities import DEFAULT_EPS, Criterion
from .simulate import (
    CovariateDistribution,
    ExponentialCovariates,
    MultivariateNormalCovariates,
    ScenarioConfig,
    UniformCovariates,
)

__all__ = ["RealDataConfig", "parse_config", "MODES"]

MODES = ("simulate", "subsample", "probabilities", "ssmse")

_CRITERIA = {"mmse": Criterion.MMSE, "mvc": Criterion.MVC}


@dataclass(frozen=True)
class RealDataConfig:
    """A validated real-data run: which CSV, which models, which sizes."""

    mode: str
    family: Family
    dataset: DatasetDescriptor
    model_set: ModelSet
    criterion: Criterion
    eps: float
    master_seed: int
    r0: int
    r: int | None
    r_grid: tuple[int, ...] | None
    n_replicates: int | None
    sampling_model: int | None  # None means model-robust sampling


class _Block:
    """A mapping view that tracks key paths and rejects unknown keys."""

    def __init__(self, data: dict, path: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(path or "<root>", f"expected a mapping, got {type(data).__name__}")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def _key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def has(self, name: str) -> bool:
        return name in self.data

    def get(self, name: str, kind, required: bool = False, default=None):
        self.seen.add(name)
        if name not in self.data:
            if required:
                raise ConfigError(self._key(name), "required key is missing")
            return default
        value = self.data[name]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
            raise ConfigError(self._key(name), f"expected an integer, got {value!r}")
        if not isinstance(value, kind):
            raise ConfigError(
                self._key(name),
                f"expected {kind.__name__}, got {type(value).__name__} ({value!r})",
            )
        return value

    def block(self, name: str, required: bool = False) -> "_Block | None":
        self.seen.add(name)
        if name not in self.data:
            if required:
                raise ConfigError(self._key(name), "required section is missing")
            return None
        return _Block(self.get(name, dict, required=required) or {}, self._key(name))

    def reject_unknown(self):
        unknown = set(self.data) - self.seen
        if unknown:
            raise ConfigError(self._key(sorted(unknown)[0]), "unknown key")

    def int_list(self, name: str, required: bool = False, default=None):
        value = self.get(name, list, required=required, default=default)
        if value is default and not required:
            return default
        out = []
        for i, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, int):
                raise ConfigError(f"{self._key(name)}[{i}]", f"expected an integer, got {item!r}")
            out.append(item)
        return out

    def float_list(self, name: str, required: bool = False, default=None):
        value = self.get(name, list, required=required, default=default)
        if value is default and not required:
            return default
        out = []
        for i, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"{self._key(name)}[{i}]", f"expected a number, got {item!r}")
            out.append(float(item))
        return out

    def str_list(self, name: str, required: bool = False, default=None):
        value = self.get(name, list, required=required, default=default)
        if value is default and not required:
            return default
        out = []
        for i, item in enumerate(value):
            if not isinstance(item, str):
                raise ConfigError(f"{self._key(name)}[{i}]", f"expected a string, got {item!r}")
            out.append(item)
        return out


def _parse_criterion(root: _Block) -> Criterion:
    text = root.get("criterion", str, default="mMSE")
    try:
        return _CRITERIA[text.lower()]
    except KeyError:
        raise ConfigError("criterion", f"expected mMSE or mVc, got {text!r}") from None


def _parse_covariates(block: _Block) -> CovariateDistribution:
    kind = block.get("distribution", str, required=True).lower()
    dimension = block.get("dimension", int, required=True)
    if kind == "exponential":
        rate = block.get("rate", float, required=True)
        block.reject_unknown()
        return ExponentialCovariates(rate=rate, dimension=dimension)
    if kind == "normal":
        mean = block.float_list("mean", required=True)
        cov_rows = block.get("covariance", list, required=True)
        block.reject_unknown()
        if len(mean) != dimension:
            raise ConfigError("covariates.mean", f"expected {dimension} entries, got {len(mean)}")
        cov = []
        for i, row in enumerate(cov_rows):
            if not isinstance(row, list) or len(row) != dimension:
                raise ConfigError(
                    f"covariates.covariance[{i}]", f"expected a row of {dimension} numbers"
                )
            cov.append([float(v) for v in row])
        if len(cov) != dimension:
            raise ConfigError("covariates.covariance", f"expected {dimension} rows, got {len(cov)}")
        return MultivariateNormalCovariates(mean=np.array(mean), cov=np.array(cov))
    if kind == "uniform":
        block.reject_unknown()
        return UniformCovariates(dimension=dimension)
    raise ConfigError(
        "covariates.distribution",
        f"expected normal, exponential or uniform, got {kind!r}",
    )


def _as_zero_based(values: "list[int]", limit: int, key: str) -> "tuple[int, ...]":
    out = []
    for v in values:
        if not (1 <= v <= limit):
            raise ConfigError(key, f"covariate position {v} outside 1..{limit}")
        out.append(v - 1)
    return tuple(sorted(set(out)))


def _parse_model_set(
    block: "_Block | None", n_main: int, default_continuous: "tuple[int, ...]", names: bool = False,
    covariate_names: "list[str] | None" = None,
) -> ModelSet:
    if block is None:
        return enumerate_quadratic_models(n_main, default_continuous)
    if names:
        listed = block.str_list("quadratic_over", default=None)
        if listed is None:
            continuous = default_continuous
        else:
            continuous = []
            for name in listed:
                if name not in covariate_names:
                    raise ConfigError(
                        f"{block.path}.quadratic_over", f"unknown covariate {name!r}"
                    )
                continuous.append(covariate_names.index(name))
            continuous = tuple(sorted(set(continuous)))
    else:
        listed = block.int_list("quadratic_over", default=None)
        if listed is None:
            continuous = default_continuous
        else:
            continuous = _as_zero_based(listed, n_main, f"{block.path}.quadratic_over")
    alpha = block.float_list("alpha", default=None)
    block.reject_unknown()
    model_set = enumerate_quadratic_models(n_main, continuous)
    if alpha is not None:
        if len(alpha) != len(model_set):
            raise ConfigError(
                f"{block.path}.alpha",
                f"expected {len(model_set)} weights, got {len(alpha)}",
            )
        model_set = ModelSet(specs=model_set.specs, alpha=validate_alpha(alpha))
    return model_set


def _parse_simulate(root: _Block, family: Family, criterion: Criterion, eps: float, seed: int) -> ScenarioConfig:
    n_population = root.get("population", int, required=True)
    replicates = root.get("replicates", int, required=True)
    r0 = root.get("r0", int, required=True)
    r_grid = root.int_list("r_grid", required=True)
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ConfigError("r_grid", f"must be strictly ascending, got {r_grid}")

    cov_block = root.block("covariates", required=True)
    covariates = _parse_covariates(cov_block)
    n_main = covariates.dimension

    model_block = root.block("model_set")
    model_set = _parse_model_set(model_block, n_main, tuple(range(n_main)))
    continuous_in_set = model_set.specs[-1].quadratic_terms

    dg_block = root.block("data_generating", required=True)
    quad = _as_zero_based(
        dg_block.int_list("quadratic_terms", default=[]), n_main, "data_generating.quadratic_terms"
    )
    theta = dg_block.float_list("theta", required=True)
    dg_block.reject_unknown()
    bad = set(quad) - set(continuous_in_set)
    if bad:
        raise ConfigError(
            "data_generating.quadratic_terms",
            f"positions {sorted(i + 1 for i in bad)} are not in the model set's quadratic_over",
        )
    dg_model = ModelSpec(main_effects=tuple(range(n_main)), quadratic_terms=quad)
    if len(theta) != dg_model.n_params:
        raise ConfigError(
            "data_generating.theta",
            f"expected {dg_model.n_params} values for intercept + {n_main} main "
            f"effects + {len(quad)} quadratic terms, got {len(theta)}",
        )
    root.reject_unknown()
    return ScenarioConfig(
        family=family,
        covariates=covariates,
        data_generating_model=dg_model,
        true_theta=np.array(theta),
        model_set=model_set,
        n_population=n_population,
        r0=r0,
        r_grid=tuple(r_grid),
        n_replicates=replicates,
        eps=eps,
        master_seed=seed,
        criterion=criterion,
    )


def _parse_dataset(block: _Block) -> DatasetDescriptor:
    path = block.get("path", str, required=True)
    response = block.get("response", str, required=True)
    names = block.str_list("covariates", required=True)
    continuous = block.str_list("continuous", default=None)
    scaling_block = block.block("scaling")
    block.reject_unknown()

    scaling = {}
    if scaling_block is not None:
        for name in list(scaling_block.data):
            rule = scaling_block.get(name, str)
            if name not in names:
                raise ConfigError(f"dataset.scaling.{name}", "not a covariate")
            try:
                scaling[name] = Scaling(rule)
            except ValueError:
                raise ConfigError(
                    f"dataset.scaling.{name}",
                    f"expected none, standardize or range-to-unit, got {rule!r}",
                ) from None
    if continuous is not None:
        for name in continuous:
            if name not in names:
                raise ConfigError("dataset.continuous", f"unknown covariate {name!r}")
    continuous_set = set(names if continuous is None else continuous)
    columns = tuple(
        CovariateColumn(
            name=name,
            continuous=name in continuous_set,
            scaling=scaling.get(name, Scaling.NONE),
        )
        for name in names
    )
    return DatasetDescriptor(path=path, response=response, covariates=columns)


def _parse_real_data(
    mode: str, root: _Block, family: Family, criterion: Criterion, eps: float, seed: int
) -> RealDataConfig:
    dataset = _parse_dataset(root.block("dataset", required=True))
    names = dataset.covariate_names
    model_block = root.block("model_set")
    model_set = _parse_model_set(
        model_block,
        len(names),
        dataset.continuous_indices,
        names=True,
        covariate_names=names,
    )
    non_continuous = set(model_set.specs[-1].quadratic_terms) - set(dataset.continuous_indices)
    if non_continuous:
        raise ConfigError(
            "model_set.quadratic_over",
            f"covariates {[names[i] for i in sorted(non_continuous)]} are not continuous",
        )

    r0 = root.get("r0", int, required=True)
    r = root.get("r", int, required=(mode == "subsample"))
    r_grid = root.int_list("r_grid", required=(mode == "ssmse"), default=None)
    replicates = root.get("replicates", int, required=(mode == "ssmse"))
    if r_grid is not None and any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ConfigError("r_grid", f"must be strictly ascending, got {r_grid}")

    sampling_model: int | None = None
    if root.has("sampling_model"):
        value = root.data["sampling_model"]
        root.seen.add("sampling_model")
        if value == "model-robust":
            sampling_model = None
        elif isinstance(value, int) and not isinstance(value, bool):
            if not (1 <= value <= len(model_set)):
                raise ConfigError(
                    "sampling_model", f"model index {value} outside 1..{len(model_set)}"
                )
            sampling_model = value - 1
        else:
            raise ConfigError(
                "sampling_model",
                f"expected 'model-robust' or a 1-based model index, got {value!r}",
            )
    root.reject_unknown()
    return RealDataConfig(
        mode=mode,
        family=family,
        dataset=dataset,
        model_set=model_set,
        criterion=criterion,
        eps=eps,
        master_seed=seed,
        r0=r0,
        r=r,
        r_grid=None if r_grid is None else tuple(r_grid),
        n_replicates=replicates,
        sampling_model=sampling_model,
    )


def parse_config(path: "str | Path") -> "ScenarioConfig | RealDataConfig":
    """Parse and validate a run configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(str(path), "config file not found")
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(str(path), f"invalid YAML: {exc}") from None
    root = _Block(data if data is not None else {})

    mode = root.get("mode", str, required=True)
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {MODES}, got {mode!r}")
    family = get_family(root.get("family", str, required=True))
    criterion = _parse_criterion(root)
    eps = root.get("eps", float, default=DEFAULT_EPS)
    if eps <= 0:
        raise ConfigError("eps", f"must be positive, got {eps}")
    seed = root.get("seed", int, default=0)
    if seed < 0:
        raise ConfigError("seed", f"must be non-negative, got {seed}")

    if mode == "simulate":
        return _parse_simulate(root, family, criterion, eps, seed)
    return _parse_real_data(mode, root, family, criterion, eps, seed)
