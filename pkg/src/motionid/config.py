"""YAML experiment configuration.

Schema (all keys optional unless noted)::

    dataset: windows.csv          # required unless a Dataset is passed in code
    provider: statistical         # or table:<embedding file>
    seed: 42
    calibration: eval             # eval | train
    eval_users: second-half       # or an explicit list of user ids
    threads: 1
    counts:
      train_pos: 20
      train_neg: 100
      test_pos: 100
      test_neg: 100
    svm:
      kernels: [linear, rbf]
      C: [1, 10, 100]
      gamma: auto                 # auto | positive float
      tolerance: 1.0e-6
      max_iterations: 10000
    augmentation: paper           # full replication grids
    # ... or an explicit grid (omitted method lists skip that method):
    # augmentation:
    #   ratios: [1.0, 0.5]
    #   noise_sigmas: [0.025, 0.1]
    #   noise_mean: 0.0
    #   temporal_factors: [0.975, 1.05]
    #   intensity_factors: [0.95]
    #   warp_directions: [lr, rl]
    #   combined: [all, noise+temporal]
    # ... or `augmentation: null` for a baseline-only run (also the
    # default when the key is omitted).

Unknown keys are rejected so typos fail loudly before any work starts.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .errors import ConfigError
from .protocol import AugmentationGrid, ExperimentConfig, SplitCounts

_TOP_KEYS = {"dataset", "provider", "seed", "calibration", "eval_users", "threads",
             "counts", "svm", "augmentation"}
_COUNT_KEYS = {"train_pos", "train_neg", "test_pos", "test_neg"}
_SVM_KEYS = {"kernels", "C", "gamma", "tolerance", "max_iterations"}
_GRID_KEYS = {"ratios", "noise_sigmas", "noise_mean", "temporal_factors",
              "intensity_factors", "warp_directions", "combined"}


def _require_mapping(obj, what: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{what} must be a mapping, got {type(obj).__name__}")
    return obj


def _reject_unknown(mapping: dict, allowed: set, what: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown {what} keys: {unknown}")


def _float_tuple(obj, what: str) -> tuple[float, ...]:
    if not isinstance(obj, (list, tuple)):
        raise ConfigError(f"{what} must be a list, got {type(obj).__name__}")
    try:
        return tuple(float(v) for v in obj)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must contain numbers, got {obj!r}") from None


def _parse_grid(obj) -> AugmentationGrid | None:
    if obj is None:
        return None
    if obj == "paper":
        return AugmentationGrid()
    grid = _require_mapping(obj, "augmentation")
    _reject_unknown(grid, _GRID_KEYS, "augmentation")
    kwargs = {}
    if "ratios" in grid:
        kwargs["ratios"] = _float_tuple(grid["ratios"], "ratios")
    for key in ("noise_sigmas", "temporal_factors", "intensity_factors"):
        kwargs[key] = _float_tuple(grid.get(key, []), key)
    if "noise_mean" in grid:
        kwargs["noise_mean"] = float(grid["noise_mean"])
    kwargs["warp_directions"] = tuple(grid.get("warp_directions", []))
    kwargs["combined"] = tuple(grid.get("combined", []))
    return AugmentationGrid(**kwargs)


def load_experiment_config(path) -> ExperimentConfig:
    """Parse and fully validate a sweep configuration file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    if raw is None:
        raw = {}
    raw = _require_mapping(raw, "configuration")
    _reject_unknown(raw, _TOP_KEYS, "configuration")

    kwargs: dict = {}
    if "dataset" in raw:
        kwargs["dataset_path"] = str(raw["dataset"])
    for key, target in (("provider", "provider"), ("calibration", "calibration")):
        if key in raw:
            kwargs[target] = str(raw[key])
    for key in ("seed", "threads"):
        if key in raw:
            kwargs[key] = int(raw[key])
    if "eval_users" in raw:
        value = raw["eval_users"]
        kwargs["eval_users"] = value if value == "second-half" else tuple(str(u) for u in value)
    if "counts" in raw:
        counts = _require_mapping(raw["counts"], "counts")
        _reject_unknown(counts, _COUNT_KEYS, "counts")
        try:
            kwargs["counts"] = SplitCounts(**{k: int(v) for k, v in counts.items()})
        except ValueError as exc:
            raise ConfigError(f"counts: {exc}") from None
    if "svm" in raw:
        svm = _require_mapping(raw["svm"], "svm")
        _reject_unknown(svm, _SVM_KEYS, "svm")
        if "kernels" in svm:
            kwargs["kernels"] = tuple(str(k) for k in svm["kernels"])
        if "C" in svm:
            kwargs["c_values"] = _float_tuple(svm["C"], "svm.C")
        if "gamma" in svm:
            gamma = svm["gamma"]
            kwargs["gamma"] = None if gamma in (None, "auto") else float(gamma)
        if "tolerance" in svm:
            kwargs["tolerance"] = float(svm["tolerance"])
        if "max_iterations" in svm:
            kwargs["max_iterations"] = int(svm["max_iterations"])
    kwargs["augmentation"] = _parse_grid(raw.get("augmentation"))

    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
