"""Few-shot user-identification experiments.

For each evaluated user, a binary problem is built from that user's
earliest gestures (positives) and gestures of other users (negatives);
the users contributing training negatives and test negatives are
disjoint, so the classifier never sees the test-time attackers. Training
data optionally passes through an augmentation plan; test data never
does. A sweep trains one SVM per (user, plan, kernel, C) cell, balances
FAR against FRR by bias calibration, and averages metrics over users.

Combined-augmentation cells compose the best-performing parameter of
each component method (as measured by the independent cells of the same
run), mirroring how mixtures are built from per-method winners.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .augment import (
    INTENSITY_FACTOR_GRID,
    NOISE_SIGMA_GRID,
    TIME_FACTOR_GRID,
    WARP_DIRECTIONS,
    AugmentationPlan,
    AugmentationSpec,
    Method,
    apply_plan,
)
from .dataio import Dataset, GestureSample, load_dataset, load_embeddings
from .errors import ConfigError
from .features import StatisticalProvider, TableProvider
from .seeds import derive_seed
from .svm import SvmConfig, balance_threshold, compute_rates, decision_scores, train

_SPLIT_TAG = 10
_PLAN_TAG = 11

COMBINED_METHODS = ("all", "noise+temporal")
CALIBRATION_MODES = ("eval", "train")


@dataclass(frozen=True)
class SplitCounts:
    """Per-user sample budget; defaults follow the replication protocol."""

    train_pos: int = 20
    train_neg: int = 100
    test_pos: int = 100
    test_neg: int = 100

    def __post_init__(self):
        for name in ("train_pos", "train_neg", "test_pos", "test_neg"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass(frozen=True)
class PoolPartition:
    """Deterministic negative-pool rule over the evaluation users.

    For a target user, the remaining evaluation users are split
    alternately by position into pool A (training negatives) and pool B
    (test negatives); the pools are disjoint and exclude the target by
    construction.
    """

    eval_users: tuple[str, ...]

    def pools_for(self, target_user: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
        others = tuple(u for u in self.eval_users if u != target_user)
        if len(others) < 2:
            raise ConfigError(
                f"need at least 2 other evaluation users to form negative pools, "
                f"have {len(others)}"
            )
        return others[0::2], others[1::2]


@dataclass(frozen=True)
class FewShotSplit:
    """One user's training/test material."""

    target_user: str
    train_pos: tuple[GestureSample, ...]
    train_neg: tuple[GestureSample, ...]
    test_pos: tuple[GestureSample, ...]
    test_neg: tuple[GestureSample, ...]
    pool_a: tuple[str, ...]
    pool_b: tuple[str, ...]


def _draw_pool_samples(
    dataset: Dataset, pool_users: Sequence[str], need: int, rng: np.random.Generator
) -> tuple[GestureSample, ...]:
    """Sample `need` gestures without replacement, spread evenly over users."""
    per_user = [dataset.samples_for(u) for u in pool_users]
    capacity = np.array([len(s) for s in per_user])
    if capacity.sum() < need:
        raise ConfigError(
            f"negative pool {list(pool_users)} holds {int(capacity.sum())} samples, "
            f"needs >= {need}"
        )
    n = len(pool_users)
    quota = np.full(n, need // n)
    extra = need % n
    if extra:
        quota[rng.permutation(n)[:extra]] += 1
    # users with fewer samples than their quota push the excess onto others
    overflow = int(np.maximum(quota - capacity, 0).sum())
    quota = np.minimum(quota, capacity)
    for idx in range(n):
        if overflow == 0:
            break
        spare = int(capacity[idx] - quota[idx])
        take = min(spare, overflow)
        quota[idx] += take
        overflow -= take
    picked = []
    for idx, samples in enumerate(per_user):
        k = int(quota[idx])
        if k == 0:
            continue
        positions = np.sort(rng.choice(len(samples), size=k, replace=False))
        picked.extend(samples[p] for p in positions)
    return tuple(picked)


def build_split(
    dataset: Dataset,
    target_user: str,
    partition: PoolPartition,
    rng: np.random.Generator,
    counts: SplitCounts = SplitCounts(),
) -> FewShotSplit:
    """Build one user's few-shot split.

    Positives: the target's earliest counts.train_pos gestures train, the
    following counts.test_pos are tested. Negatives come from the two
    disjoint pools of the partition, drawn evenly across pool users.
    """
    if target_user not in partition.eval_users:
        raise ConfigError(f"target user {target_user!r} is not an evaluation user")
    positives = dataset.samples_for(target_user)
    needed = counts.train_pos + counts.test_pos
    if len(positives) < needed:
        raise ConfigError(
            f"user {target_user!r} has {len(positives)} samples, needs >= {needed}"
        )
    pool_a, pool_b = partition.pools_for(target_user)
    train_neg = _draw_pool_samples(dataset, pool_a, counts.train_neg, rng)
    test_neg = _draw_pool_samples(dataset, pool_b, counts.test_neg, rng)
    split = FewShotSplit(
        target_user=target_user,
        train_pos=positives[: counts.train_pos],
        train_neg=train_neg,
        test_pos=positives[counts.train_pos : counts.train_pos + counts.test_pos],
        test_neg=test_neg,
        pool_a=pool_a,
        pool_b=pool_b,
    )
    assert not set(s.user_id for s in split.train_neg) & set(s.user_id for s in split.test_neg)
    all_keys = [s.key for part in (split.train_pos, split.train_neg, split.test_pos, split.test_neg) for s in part]
    assert len(all_keys) == len(set(all_keys)), "sample appears twice within a split"
    return split


def make_provider(spec: str):
    """Provider factory: "statistical" or "table:<embedding file>"."""
    if spec == "statistical":
        return StatisticalProvider()
    if spec.startswith("table:"):
        path = spec[len("table:") :]
        if not path:
            raise ConfigError("table provider needs a path: 'table:<file>'")
        return TableProvider(load_embeddings(path), name=spec)
    raise ConfigError(f"unknown embedding provider {spec!r}")


@dataclass(frozen=True)
class UserCellResult:
    """Metrics of one (user, plan, kernel, C) cell."""

    accuracy: float
    far: float
    frr: float
    calibration_achieved: bool
    n_train_pos: int
    n_train_neg: int
    scores: np.ndarray | None = None


class _SplitFeatures:
    """Raw embeddings of one split, reused across plans and SVM cells."""

    def __init__(self, split: FewShotSplit, provider):
        self.split = split
        self.provider = provider
        self.train_pos = provider.embed_samples(split.train_pos)
        self.train_neg = provider.embed_samples(split.train_neg)
        self.x_test = np.vstack(
            [provider.embed_samples(split.test_pos), provider.embed_samples(split.test_neg)]
        )
        self.y_test = np.concatenate(
            [np.ones(len(split.test_pos)), -np.ones(len(split.test_neg))]
        )

    def training_features(self, plan: AugmentationPlan | None) -> tuple[np.ndarray, np.ndarray]:
        """(positive, negative) training feature blocks, augmented per plan."""
        if plan is None:
            return self.train_pos, self.train_neg
        if not self.provider.supports_signals:
            raise ConfigError(
                "augmentation produces new signals, which a table embedding "
                "provider cannot embed; use provider 'statistical' or drop the plan"
            )
        blocks = []
        for tag, samples, base in ((0, self.split.train_pos, self.train_pos),
                                   (1, self.split.train_neg, self.train_neg)):
            class_plan = replace(plan, base_seed=derive_seed(plan.base_seed, tag))
            expanded = apply_plan([s.signal for s in samples], class_plan)
            copies = expanded[len(samples):]
            extra = self.provider.embed_signals(copies)
            blocks.append(np.vstack([base, extra]))
        return blocks[0], blocks[1]


def _standardize(train: np.ndarray, test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # z-score per dimension on training statistics; constant dims pass through
    mu = train.mean(axis=0)
    sd = train.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (train - mu) / sd, (test - mu) / sd


def _evaluate(
    feats: _SplitFeatures,
    x_pos: np.ndarray,
    x_neg: np.ndarray,
    svm_cfg: SvmConfig,
    calibration: str,
    keep_scores: bool,
) -> UserCellResult:
    x_train = np.vstack([x_pos, x_neg])
    y_train = np.concatenate([np.ones(len(x_pos)), -np.ones(len(x_neg))])
    x_train_std, x_test_std = _standardize(x_train, feats.x_test)
    model = train(x_train_std, y_train, svm_cfg)
    test_scores = decision_scores(model, x_test_std)
    if calibration == "eval":
        threshold, cal_far, cal_frr = balance_threshold(test_scores, feats.y_test)
    elif calibration == "train":
        train_scores = decision_scores(model, x_train_std)
        threshold, cal_far, cal_frr = balance_threshold(train_scores, y_train)
    else:
        raise ConfigError(f"calibration mode must be one of {CALIBRATION_MODES}, got {calibration!r}")
    rates, accuracy = compute_rates(test_scores, feats.y_test, threshold)
    return UserCellResult(
        accuracy=accuracy,
        far=rates.far,
        frr=rates.frr,
        calibration_achieved=abs(cal_far - cal_frr) < 0.01,
        n_train_pos=len(x_pos),
        n_train_neg=len(x_neg),
        scores=(test_scores - threshold) if keep_scores else None,
    )


def run_cell(
    split: FewShotSplit,
    plan: AugmentationPlan | None,
    provider,
    svm_cfg: SvmConfig,
    calibration: str = "eval",
) -> UserCellResult:
    """Train and evaluate one user's classifier for one configuration.

    Only training signals pass through the plan; test samples are used
    exactly as stored. Returned scores are the calibrated test decision
    values (positives first, then negatives).
    """
    feats = _SplitFeatures(split, provider)
    x_pos, x_neg = feats.training_features(plan)
    return _evaluate(feats, x_pos, x_neg, svm_cfg, calibration, keep_scores=True)


# --- sweep configuration ----------------------------------------------------


@dataclass(frozen=True)
class AugmentationGrid:
    """Which augmentation cells a sweep visits; defaults are the full grids."""

    ratios: tuple[float, ...] = (1.0, 0.5)
    noise_sigmas: tuple[float, ...] = NOISE_SIGMA_GRID
    noise_mean: float = 0.0
    temporal_factors: tuple[float, ...] = TIME_FACTOR_GRID
    intensity_factors: tuple[float, ...] = INTENSITY_FACTOR_GRID
    warp_directions: tuple[str, ...] = WARP_DIRECTIONS
    combined: tuple[str, ...] = COMBINED_METHODS

    def __post_init__(self):
        if not self.ratios or any(r <= 0 for r in self.ratios):
            raise ConfigError(f"ratios must be non-empty positives, got {self.ratios}")
        for d in self.warp_directions:
            if d not in WARP_DIRECTIONS:
                raise ConfigError(f"warp direction must be in {WARP_DIRECTIONS}, got {d!r}")
        for name in self.combined:
            if name not in COMBINED_METHODS:
                raise ConfigError(f"combined method must be in {COMBINED_METHODS}, got {name!r}")
        if "noise+temporal" in self.combined and not (self.noise_sigmas and self.temporal_factors):
            raise ConfigError("combined 'noise+temporal' needs noise and temporal grids")
        if "all" in self.combined and not (
            self.noise_sigmas and self.temporal_factors
            and self.intensity_factors and self.warp_directions
        ):
            raise ConfigError("combined 'all' needs every independent method in the grid")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; see config.load_experiment_config for the file form."""

    dataset_path: str | None = None
    provider: str = "statistical"
    seed: int = 0
    calibration: str = "eval"
    eval_users: tuple[str, ...] | str = "second-half"
    counts: SplitCounts = SplitCounts()
    kernels: tuple[str, ...] = ("linear", "rbf")
    c_values: tuple[float, ...] = (1.0, 10.0, 100.0)
    gamma: float | None = None
    tolerance: float = 1e-6
    max_iterations: int = 10_000
    augmentation: AugmentationGrid | None = field(default_factory=AugmentationGrid)
    threads: int = 1

    def __post_init__(self):
        if not self.kernels or not self.c_values:
            raise ConfigError("kernel and C grids must be non-empty")
        if any(c <= 0 for c in self.c_values):
            raise ConfigError(f"C values must be positive, got {self.c_values}")
        if self.calibration not in CALIBRATION_MODES:
            raise ConfigError(
                f"calibration must be one of {CALIBRATION_MODES}, got {self.calibration!r}"
            )
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        try:  # validate solver settings before any cell runs
            for kernel in self.kernels:
                SvmConfig(
                    kernel=kernel,
                    C=min(self.c_values),
                    gamma=self.gamma,
                    tolerance=self.tolerance,
                    max_iterations=self.max_iterations,
                )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class SweepPlan:
    """One row-group of the sweep: a method with one parameter setting."""

    method: str
    parameter: str
    ratio: float | None
    specs: tuple[AugmentationSpec, ...]


BASELINE_PLAN = SweepPlan(method="none", parameter="-", ratio=None, specs=())


def independent_plans(grid: AugmentationGrid) -> list[SweepPlan]:
    """Single-method plans in report order: per ratio, the four methods."""
    plans = []
    for ratio in grid.ratios:
        for sigma in grid.noise_sigmas:
            spec = AugmentationSpec(Method.NOISE, mean=grid.noise_mean, sigma=sigma)
            plans.append(SweepPlan("noise", f"sigma={sigma:g}", ratio, (spec,)))
        for factor in grid.temporal_factors:
            spec = AugmentationSpec(Method.TEMPORAL, time_factor=factor)
            plans.append(SweepPlan("temporal", f"factor={factor:g}", ratio, (spec,)))
        for factor in grid.intensity_factors:
            spec = AugmentationSpec(Method.INTENSITY, intensity_factor=factor)
            plans.append(SweepPlan("intensity", f"factor={factor:g}", ratio, (spec,)))
        for direction in grid.warp_directions:
            method = Method.WARP_LR if direction == "lr" else Method.WARP_RL
            label = "L->R" if direction == "lr" else "R->L"
            plans.append(SweepPlan("warp", label, ratio, (AugmentationSpec(method),)))
    return plans


_SPEC_LABELS = {
    Method.NOISE: lambda s: f"sigma={s.sigma:g}",
    Method.TEMPORAL: lambda s: f"factor={s.time_factor:g}",
    Method.INTENSITY: lambda s: f"factor={s.intensity_factor:g}",
    Method.WARP_LR: lambda s: "L->R",
    Method.WARP_RL: lambda s: "R->L",
}


def combined_plans(grid: AugmentationGrid, best_specs: dict) -> list[SweepPlan]:
    """Mixture plans at ratio 1.0 built from per-method winners."""
    plans = []
    order = ("noise", "temporal", "intensity", "warp")
    for name in grid.combined:
        members = order if name == "all" else ("noise", "temporal")
        specs = tuple(best_specs[m] for m in members)
        label = ";".join(_SPEC_LABELS[s.method](s) for s in specs)
        plans.append(SweepPlan(name, label, 1.0, specs))
    return plans


# --- sweep execution ---------------------------------------------------------


@dataclass(frozen=True)
class CellResult:
    """Aggregated metrics of one (plan, kernel, C) cell over all eval users."""

    method: str
    parameter: str
    ratio: float | None
    kernel: str
    C: float
    user_ids: tuple[str, ...]
    accuracies: tuple[float, ...]
    fars: tuple[float, ...]
    frrs: tuple[float, ...]
    mean_accuracy: float
    mean_far: float
    mean_frr: float
    calibration_all_achieved: bool
    best_in_group: bool = False
    exceeds_baseline: bool = False

    @property
    def group(self) -> tuple[str, float | None]:
        return (self.method, self.ratio)


@dataclass(frozen=True)
class EvalReport:
    """All sweep cells plus run metadata."""

    cells: tuple[CellResult, ...]
    metadata: dict

    def baseline(self) -> CellResult:
        for cell in self.cells:
            if cell.method == "none" and cell.best_in_group:
                return cell
        raise LookupError("report has no baseline cell")


def _resolve_eval_users(cfg: ExperimentConfig, dataset: Dataset) -> tuple[str, ...]:
    if cfg.eval_users == "second-half":
        users = dataset.users
        if len(users) < 3:
            raise ConfigError(f"dataset has {len(users)} users, too few to halve")
        return users[len(users) // 2 :]
    users = tuple(cfg.eval_users)
    unknown = [u for u in users if u not in set(dataset.users)]
    if unknown:
        raise ConfigError(f"eval users not in dataset: {unknown}")
    if not users:
        raise ConfigError("eval_users is empty")
    return users


def _user_results(dataset, cfg, plans, eval_users, u_idx, provider, plan_offset=0):
    """All cell metrics for one user; raises with cell coordinates on failure."""
    user = eval_users[u_idx]
    partition = PoolPartition(eval_users=eval_users)
    rng = np.random.default_rng(derive_seed(cfg.seed, _SPLIT_TAG, u_idx))
    split = build_split(dataset, user, partition, rng, cfg.counts)
    feats = _SplitFeatures(split, provider)
    out = {}
    for p_idx, plan in enumerate(plans):
        seed = derive_seed(cfg.seed, _PLAN_TAG, u_idx, plan_offset + p_idx)
        aug = AugmentationPlan(plan.specs, plan.ratio, base_seed=seed) if plan.specs else None
        try:
            x_pos, x_neg = feats.training_features(aug)
            for kernel in cfg.kernels:
                for c_value in cfg.c_values:
                    svm_cfg = SvmConfig(
                        kernel=kernel,
                        C=c_value,
                        gamma=cfg.gamma,
                        tolerance=cfg.tolerance,
                        max_iterations=cfg.max_iterations,
                    )
                    result = _evaluate(feats, x_pos, x_neg, svm_cfg, cfg.calibration, False)
                    out[(plan_offset + p_idx, kernel, c_value)] = result
        except Exception as exc:
            raise RuntimeError(
                f"cell failed: user={user!r} method={plan.method!r} "
                f"parameter={plan.parameter!r} ratio={plan.ratio} "
                f"({type(exc).__name__}: {exc})"
            ) from exc
    return out


_POOL_STATE: tuple | None = None


def _pool_worker(u_idx: int):
    dataset, cfg, plans, eval_users, provider, plan_offset = _POOL_STATE
    return _user_results(dataset, cfg, plans, eval_users, u_idx, provider, plan_offset)


def _run_users(dataset, cfg, plans, eval_users, provider, plan_offset=0) -> list[dict]:
    """Per-user metric dicts, in eval_users order regardless of scheduling."""
    if cfg.threads <= 1 or len(eval_users) == 1:
        return [
            _user_results(dataset, cfg, plans, eval_users, u, provider, plan_offset)
            for u in range(len(eval_users))
        ]
    global _POOL_STATE
    _POOL_STATE = (dataset, cfg, plans, eval_users, provider, plan_offset)
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(cfg.threads, len(eval_users))) as pool:
            return pool.map(_pool_worker, range(len(eval_users)))
    finally:
        _POOL_STATE = None


def _assemble_cells(plans, per_user, eval_users, cfg, plan_offset=0) -> list[CellResult]:
    cells = []
    for p_idx, plan in enumerate(plans):
        for kernel in cfg.kernels:
            for c_value in cfg.c_values:
                key = (plan_offset + p_idx, kernel, c_value)
                results = [per_user[u][key] for u in range(len(eval_users))]
                acc = tuple(r.accuracy for r in results)
                far = tuple(r.far for r in results)
                frr = tuple(r.frr for r in results)
                cells.append(
                    CellResult(
                        method=plan.method,
                        parameter=plan.parameter,
                        ratio=plan.ratio,
                        kernel=kernel,
                        C=c_value,
                        user_ids=tuple(eval_users),
                        accuracies=acc,
                        fars=far,
                        frrs=frr,
                        mean_accuracy=float(np.mean(acc)),
                        mean_far=float(np.mean(far)),
                        mean_frr=float(np.mean(frr)),
                        calibration_all_achieved=all(r.calibration_achieved for r in results),
                    )
                )
    return cells


def _cell_rank(cell: CellResult):
    # highest accuracy first; ties prefer balanced rates, then smaller C,
    # then a fixed lexical order so the winner is unique
    return (
        -cell.mean_accuracy,
        abs(cell.mean_far - cell.mean_frr),
        cell.C,
        cell.parameter,
        cell.kernel,
        cell.ratio if cell.ratio is not None else 0.0,
    )


def _mark(cells: list[CellResult]) -> list[CellResult]:
    """Flag the winner of every (method, ratio) group and baseline exceedance."""
    groups: dict = {}
    for cell in cells:
        groups.setdefault(cell.group, []).append(cell)
    winners = {group: min(members, key=_cell_rank) for group, members in groups.items()}
    baseline_acc = winners[("none", None)].mean_accuracy
    marked = []
    for cell in cells:
        marked.append(
            replace(
                cell,
                best_in_group=cell is winners[cell.group],
                exceeds_baseline=cell.mean_accuracy > baseline_acc,
            )
        )
    return marked


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None) -> EvalReport:
    """Run the full sweep described by the configuration.

    Baseline cells are always included. Independent-method cells run
    first; combined cells then reuse the best parameter found for each
    component method. Deterministic in cfg.seed, including under
    threads > 1.
    """
    if dataset is None:
        if cfg.dataset_path is None:
            raise ConfigError("no dataset: config has no path and none was passed")
        dataset = load_dataset(cfg.dataset_path)
    provider = make_provider(cfg.provider)
    if cfg.augmentation is not None and not provider.supports_signals:
        raise ConfigError(
            "augmentation produces new signals, which a table embedding provider "
            "cannot embed; use provider 'statistical' or drop the augmentation grid"
        )
    eval_users = _resolve_eval_users(cfg, dataset)
    for user in eval_users:
        PoolPartition(eval_users=eval_users).pools_for(user)

    grid = cfg.augmentation
    phase1 = [BASELINE_PLAN] + (independent_plans(grid) if grid is not None else [])
    per_user = _run_users(dataset, cfg, phase1, eval_users, provider)
    cells = _assemble_cells(phase1, per_user, eval_users, cfg)

    if grid is not None and grid.combined:
        by_method: dict[str, list[tuple]] = {}
        for p_idx, plan in enumerate(phase1):
            if plan.method == "none":
                continue
            for cell in cells:
                if (cell.method, cell.parameter, cell.ratio) == (
                    plan.method,
                    plan.parameter,
                    plan.ratio,
                ):
                    by_method.setdefault(plan.method, []).append((cell, plan))
        best_specs = {
            method: min(pairs, key=lambda pair: _cell_rank(pair[0]))[1].specs[0]
            for method, pairs in by_method.items()
        }
        phase2 = combined_plans(grid, best_specs)
        per_user2 = _run_users(dataset, cfg, phase2, eval_users, provider, plan_offset=len(phase1))
        cells += _assemble_cells(phase2, per_user2, eval_users, cfg, plan_offset=len(phase1))

    metadata = {
        "seed": cfg.seed,
        "provider": cfg.provider,
        "calibration": cfg.calibration,
        "gamma": "auto (1/(dim*var))" if cfg.gamma is None else cfg.gamma,
        "kernels": list(cfg.kernels),
        "c_values": list(cfg.c_values),
        "counts": {
            "train_pos": cfg.counts.train_pos,
            "train_neg": cfg.counts.train_neg,
            "test_pos": cfg.counts.test_pos,
            "test_neg": cfg.counts.test_neg,
        },
        "n_eval_users": len(eval_users),
        "tolerance": cfg.tolerance,
        "max_iterations": cfg.max_iterations,
    }
    return EvalReport(cells=tuple(_mark(cells)), metadata=metadata)
