"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The heavyweight fixtures (100-user synthetic dataset, full replication
sweep) are shared across criteria; the determinism criterion re-runs the
sweep from scratch and compares report files byte for byte.
"""

import hashlib
import time
from contextlib import contextmanager

import numpy as np
import pytest

from motionid import (
    INTENSITY_FACTOR_GRID,
    NOISE_SIGMA_GRID,
    TIME_FACTOR_GRID,
    AugmentationPlan,
    AugmentationSpec,
    ExperimentConfig,
    Method,
    PoolPartition,
    Signal,
    StatisticalProvider,
    SvmConfig,
    SynthConfig,
    WarpCuts,
    add_random_noise,
    apply_plan,
    build_split,
    decision_scores,
    draw_warp_cuts,
    generate,
    intensity_scale,
    run_cell,
    run_experiment,
    temporal_scale,
    train,
    warp,
)
from motionid.protocol import _SPLIT_TAG, FewShotSplit
from motionid.report import read_grid_csv, recompute_markers, write_report
from motionid.seeds import derive_seed
from motionid.svm import balance_threshold, kernel_matrix

from test_svm import qp_oracle, random_instance

ACCEPT_SEED = 2026
SWEEP_TIME_BUDGET_S = 600.0


@contextmanager
def criterion(num: int, description: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {num}: {description}")
        raise
    print(f"[PASS] criterion {num}: {description}")


@pytest.fixture(scope="module")
def full_dataset():
    # 100 users x 200 events, 6 x 150 windows; jitter = 10% of the unit
    # signature amplitude (easy separability)
    return generate(SynthConfig(seed=ACCEPT_SEED))


@pytest.fixture(scope="module")
def dataset_hashes(full_dataset):
    return [hashlib.sha256(s.signal.values.tobytes()).hexdigest() for s in full_dataset.samples]


@pytest.fixture(scope="module")
def sweep(full_dataset, dataset_hashes, tmp_path_factory):
    cfg = ExperimentConfig(seed=ACCEPT_SEED)  # full replication grids
    start = time.perf_counter()
    report = run_experiment(cfg, full_dataset)
    elapsed = time.perf_counter() - start
    out_dir = tmp_path_factory.mktemp("sweep")
    write_report(report, out_dir)
    return {"cfg": cfg, "report": report, "elapsed": elapsed, "out_dir": out_dir}


def test_criterion_01_identity_augmentations(rng):
    with criterion(1, "identity parameters reproduce the input within 1e-12"):
        start = time.perf_counter()
        for _ in range(100):
            s = Signal(rng.normal(size=(6, 150)))
            outs = [
                add_random_noise(s, 0.0, 0.0, np.random.default_rng(0)),
                temporal_scale(s, 1.0),
                intensity_scale(s, 1.0),
                warp(s, "lr", WarpCuts(t1=75, t2=75, n=150)),
                warp(s, "rl", WarpCuts(t1=75, t2=75, n=150)),
            ]
            for out in outs:
                assert np.max(np.abs(out.values - s.values)) <= 1e-12
        assert time.perf_counter() - start < 1.0


def test_criterion_02_shape_preservation_full_grids(rng):
    with criterion(2, "every method preserves (channels, length) over the full grids"):
        start = time.perf_counter()
        for trial in range(10):
            s = Signal(rng.normal(size=(6, 150)))
            outs = []
            for sigma in NOISE_SIGMA_GRID:
                outs.append(add_random_noise(s, 0.0, sigma, np.random.default_rng(trial)))
            for factor in TIME_FACTOR_GRID:
                outs.append(temporal_scale(s, factor))
            for factor in INTENSITY_FACTOR_GRID:
                outs.append(intensity_scale(s, factor))
            for direction in ("lr", "rl"):
                outs.append(warp(s, direction, draw_warp_cuts(150, rng)))
            for out in outs:
                assert out.values.shape == (6, 150)
        assert time.perf_counter() - start < 5.0


def test_criterion_03_noise_statistics():
    with criterion(3, "sigma=0.1 noise on 1e5 zero samples has the right moments"):
        start = time.perf_counter()
        s = Signal(np.zeros((100, 1000)))
        out = add_random_noise(s, 0.0, 0.1, np.random.default_rng(ACCEPT_SEED))
        values = out.values.ravel()
        assert values.size == 100_000
        assert abs(values.mean()) <= 0.001
        assert 0.099 <= values.std() <= 0.101
        assert time.perf_counter() - start < 1.0


def test_criterion_04_warp_cut_bounds():
    with criterion(4, "1e4 warp-cut draws at n=150 stay in/attain the floor bounds"):
        start = time.perf_counter()
        rng = np.random.default_rng(ACCEPT_SEED)
        t1 = np.empty(10_000, dtype=int)
        t2 = np.empty(10_000, dtype=int)
        for i in range(10_000):
            cuts = draw_warp_cuts(150, rng)
            t1[i], t2[i] = cuts.t1, cuts.t2
        assert t1.min() == 37 and t1.max() == 75
        assert t2.min() == 75 and t2.max() == 112
        assert np.all((37 <= t1) & (t1 <= 75))
        assert np.all((75 <= t2) & (t2 <= 112))
        assert time.perf_counter() - start < 1.0


def test_criterion_05_svm_oracle_equivalence():
    with criterion(5, "dual objective within 1e-4 of a QP oracle, predictions equal"):
        start = time.perf_counter()
        rng = np.random.default_rng(ACCEPT_SEED)
        grid_axis = np.linspace(-2.5, 2.5, 5)
        grid = np.array([[gx, gy] for gx in grid_axis for gy in grid_axis])
        kernels = ("linear", "rbf")
        c_grid = (1.0, 10.0, 100.0)
        for case in range(200):
            x, y, _, _ = random_instance(rng)
            kernel = kernels[case % 2]
            C = c_grid[case % 3]
            gamma = 0.5 if kernel == "rbf" else None
            model = train(x, y, SvmConfig(kernel=kernel, C=C, gamma=gamma))
            K = kernel_matrix(kernel, x, x, gamma)
            alpha, oracle_obj, oracle_bias = qp_oracle(K, y, C)
            assert abs(model.dual_objective - oracle_obj) <= 1e-4
            oracle_scores = kernel_matrix(kernel, grid, x, gamma) @ (alpha * y) + oracle_bias
            assert np.array_equal(
                np.sign(decision_scores(model, grid)), np.sign(oracle_scores)
            )
        assert time.perf_counter() - start < 30.0


def test_criterion_06_bias_calibration_bound():
    with criterion(6, "|FAR-FRR| <= 0.01 achieved in >= 99/100 overlapping trials"):
        start = time.perf_counter()
        rng = np.random.default_rng(ACCEPT_SEED)
        achieved = 0
        for _ in range(100):
            pos = rng.normal(0.7, 1.0, size=100)
            neg = rng.normal(-0.7, 1.3, size=100)
            scores = np.concatenate([pos, neg])
            labels = np.concatenate([np.ones(100), -np.ones(100)])
            _, far, frr = balance_threshold(scores, labels)
            achieved += abs(far - frr) <= 0.01
        assert achieved >= 99
        assert time.perf_counter() - start < 5.0


def test_criterion_07_sample_count_arithmetic(rng):
    with criterion(7, "ratio 1x gives 40 pos + 200 neg; ratio 0.5x gives 30 + 150"):
        positives = [Signal(rng.normal(size=(6, 150))) for _ in range(20)]
        negatives = [Signal(rng.normal(size=(6, 150))) for _ in range(100)]
        spec = AugmentationSpec(Method.NOISE, sigma=0.1)
        for ratio, n_pos, n_neg in ((1.0, 40, 200), (0.5, 30, 150)):
            plan = AugmentationPlan((spec,), ratio=ratio, base_seed=1)
            assert len(apply_plan(positives, plan)) == n_pos
            assert len(apply_plan(negatives, plan)) == n_neg


def test_criterion_08_split_disjointness_and_untouched_tests(
    full_dataset, dataset_hashes, sweep
):
    with criterion(8, "negative pools disjoint for all 50 users; test signals untouched"):
        cfg = sweep["cfg"]
        eval_users = full_dataset.users[50:]
        assert len(eval_users) == 50
        partition = PoolPartition(eval_users=eval_users)
        for u_idx, user in enumerate(eval_users):
            rng = np.random.default_rng(derive_seed(cfg.seed, _SPLIT_TAG, u_idx))
            split = build_split(full_dataset, user, partition, rng)
            train_users = {s.user_id for s in split.train_neg}
            test_users = {s.user_id for s in split.test_neg}
            assert not train_users & test_users
            assert user not in train_users | test_users
        after = [
            hashlib.sha256(s.signal.values.tobytes()).hexdigest()
            for s in full_dataset.samples
        ]
        assert after == dataset_hashes


def test_criterion_09_end_to_end_synthetic_experiment(sweep):
    with criterion(9, "full replication sweep: accuracy, balance, structure, runtime"):
        report = sweep["report"]
        assert sweep["elapsed"] < SWEEP_TIME_BUDGET_S

        baseline = report.baseline()
        assert baseline.mean_accuracy >= 0.95
        assert abs(baseline.mean_far - baseline.mean_frr) < 0.01
        for cell in report.cells:
            if cell.method == "none":
                assert cell.mean_accuracy >= 0.95

        # cell bookkeeping: baseline 6; 8+10+10+2 methods x 2 ratios x 6; 2 combined x 6
        assert len(report.cells) == (1 + 30 * 2 + 2) * 6
        rows = read_grid_csv(sweep["out_dir"] / "grid.csv")
        assert len(rows) == len(report.cells)
        assert recompute_markers(
            [{**r, "best_in_group": "0", "exceeds_baseline": "0"} for r in rows]
        ) == rows

        text = (sweep["out_dir"] / "table_independent.txt").read_text()
        assert "== no augmentation" in text
        assert "== augmentation of all samples with ratio 1x" in text
        assert "== augmentation of all samples with ratio 0.5x" in text
        for label in ("random noise", "temporal scaling", "intensity scaling", "warping"):
            assert text.count(label) == 2
        combined = (sweep["out_dir"] / "table_combined.txt").read_text()
        assert "all methods" in combined
        assert "noise+temporal" in combined
        assert "== no augmentation" in combined


def test_criterion_10_identity_augmentation_equivalence(full_dataset):
    with criterion(10, "f_I=1.0 plan scores match duplicated-baseline scores to 1e-6"):
        eval_users = full_dataset.users[50:]
        partition = PoolPartition(eval_users=eval_users)
        provider = StatisticalProvider()
        plan = AugmentationPlan(
            (AugmentationSpec(Method.INTENSITY, intensity_factor=1.0),),
            ratio=1.0,
            base_seed=ACCEPT_SEED,
        )
        for u_idx in (0, 17, 49):
            rng = np.random.default_rng(derive_seed(ACCEPT_SEED, _SPLIT_TAG, u_idx))
            split = build_split(full_dataset, eval_users[u_idx], partition, rng)
            duplicated = FewShotSplit(
                target_user=split.target_user,
                train_pos=split.train_pos + split.train_pos,
                train_neg=split.train_neg + split.train_neg,
                test_pos=split.test_pos,
                test_neg=split.test_neg,
                pool_a=split.pool_a,
                pool_b=split.pool_b,
            )
            for kernel in ("linear", "rbf"):
                for c_value in (1.0, 100.0):
                    svm_cfg = SvmConfig(kernel=kernel, C=c_value)
                    augmented = run_cell(split, plan, provider, svm_cfg)
                    doubled = run_cell(duplicated, None, provider, svm_cfg)
                    assert augmented.n_train_pos == doubled.n_train_pos == 40
                    assert augmented.n_train_neg == doubled.n_train_neg == 200
                    assert np.max(np.abs(augmented.scores - doubled.scores)) <= 1e-6


def test_criterion_11_sweep_determinism(sweep, tmp_path):
    with criterion(11, "re-running the sweep reproduces byte-identical reports"):
        dataset = generate(SynthConfig(seed=ACCEPT_SEED))
        report = run_experiment(ExperimentConfig(seed=ACCEPT_SEED), dataset)
        out_dir = tmp_path / "rerun"
        write_report(report, out_dir)
        names = ("grid.csv", "per_user.csv", "table_independent.txt",
                 "table_combined.txt", "metadata.json")
        for name in names:
            assert (out_dir / name).read_bytes() == (sweep["out_dir"] / name).read_bytes()
