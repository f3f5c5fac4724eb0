import pytest

from motionid import ConfigError, load_experiment_config
from motionid.augment import NOISE_SIGMA_GRID, TIME_FACTOR_GRID


def write(tmp_path, text):
    path = tmp_path / "cfg.yaml"
    path.write_text(text)
    return path


class TestLoadExperimentConfig:
    def test_minimal_config_defaults(self, tmp_path):
        cfg = load_experiment_config(write(tmp_path, "dataset: d.csv\n"))
        assert cfg.dataset_path == "d.csv"
        assert cfg.provider == "statistical"
        assert cfg.kernels == ("linear", "rbf")
        assert cfg.c_values == (1.0, 10.0, 100.0)
        assert cfg.augmentation is None  # baseline-only unless requested
        assert cfg.eval_users == "second-half"
        assert cfg.calibration == "eval"

    def test_paper_shortcut_expands_full_grids(self, tmp_path):
        cfg = load_experiment_config(write(tmp_path, "dataset: d.csv\naugmentation: paper\n"))
        grid = cfg.augmentation
        assert grid.ratios == (1.0, 0.5)
        assert grid.noise_sigmas == NOISE_SIGMA_GRID
        assert grid.temporal_factors == TIME_FACTOR_GRID
        assert grid.combined == ("all", "noise+temporal")

    def test_explicit_grid(self, tmp_path):
        cfg = load_experiment_config(
            write(
                tmp_path,
                "dataset: d.csv\n"
                "augmentation:\n"
                "  ratios: [1.0]\n"
                "  noise_sigmas: [0.1, 0.2]\n"
                "  combined: []\n",
            )
        )
        grid = cfg.augmentation
        assert grid.noise_sigmas == (0.1, 0.2)
        assert grid.temporal_factors == ()
        assert grid.combined == ()

    def test_svm_section(self, tmp_path):
        cfg = load_experiment_config(
            write(
                tmp_path,
                "dataset: d.csv\n"
                "svm:\n"
                "  kernels: [rbf]\n"
                "  C: [5]\n"
                "  gamma: 0.25\n"
                "  tolerance: 1.0e-8\n"
                "  max_iterations: 500\n",
            )
        )
        assert cfg.kernels == ("rbf",)
        assert cfg.c_values == (5.0,)
        assert cfg.gamma == 0.25
        assert cfg.tolerance == 1e-8
        assert cfg.max_iterations == 500

    def test_gamma_auto(self, tmp_path):
        cfg = load_experiment_config(write(tmp_path, "dataset: d.csv\nsvm: {gamma: auto}\n"))
        assert cfg.gamma is None

    def test_explicit_eval_users(self, tmp_path):
        cfg = load_experiment_config(write(tmp_path, "dataset: d.csv\neval_users: [u1, u2]\n"))
        assert cfg.eval_users == ("u1", "u2")

    def test_counts_section(self, tmp_path):
        cfg = load_experiment_config(
            write(tmp_path, "dataset: d.csv\ncounts: {train_pos: 5, train_neg: 10, test_pos: 10, test_neg: 10}\n")
        )
        assert cfg.counts.train_pos == 5

    @pytest.mark.parametrize(
        "text,match",
        [
            ("dataset: d.csv\nbogus: 1\n", "unknown"),
            ("dataset: d.csv\nsvm: {kernels: []}\n", "non-empty"),
            ("dataset: d.csv\nsvm: {C: [-1]}\n", "positive"),
            ("dataset: d.csv\ncalibration: sometimes\n", "calibration"),
            ("dataset: d.csv\naugmentation: {warp_directions: [sideways]}\n", "direction"),
            ("dataset: d.csv\naugmentation: {combined: [all]}\n", "all"),
            ("dataset: d.csv\ncounts: {train_pos: 0}\n", "train_pos"),
            ("- just\n- a list\n", "mapping"),
            ("dataset: d.csv\nsvm: {C: not-a-list}\n", "list"),
        ],
    )
    def test_invalid_configs_rejected(self, tmp_path, text, match):
        with pytest.raises(ConfigError, match=match):
            load_experiment_config(write(tmp_path, text))

    def test_invalid_yaml_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="YAML"):
            load_experiment_config(write(tmp_path, "a: [unclosed\n"))
