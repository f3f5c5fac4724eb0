import numpy as np
import pytest

from motionid import SynthConfig, generate
from motionid.synth import user_signature


class TestGenerate:
    def test_replication_scale_sample_count(self):
        # full user/event grid at a tiny window size
        cfg = SynthConfig(n_users=100, samples_per_user=200, length=10, n_channels=1, seed=0)
        ds = generate(cfg)
        assert len(ds) == 20_000
        assert len(ds.users) == 100
        assert all(len(ds.samples_for(u)) == 200 for u in ds.users)

    def test_zero_jitter_makes_identical_samples(self):
        cfg = SynthConfig(n_users=2, samples_per_user=4, length=30, n_channels=2,
                          jitter_std=0.0, seed=5)
        ds = generate(cfg)
        for u in ds.users:
            samples = ds.samples_for(u)
            for s in samples[1:]:
                assert np.array_equal(s.signal.values, samples[0].signal.values)

    def test_deterministic_given_seed(self):
        cfg = SynthConfig(n_users=3, samples_per_user=5, length=25, n_channels=2, seed=9)
        a, b = generate(cfg), generate(cfg)
        assert a == b

    def test_different_seeds_differ(self):
        a = generate(SynthConfig(n_users=2, samples_per_user=2, length=25, seed=1))
        b = generate(SynthConfig(n_users=2, samples_per_user=2, length=25, seed=2))
        assert a != b

    def test_signatures_differ_between_users(self):
        cfg = SynthConfig(n_users=2, samples_per_user=2, length=40, seed=3)
        assert not np.allclose(user_signature(cfg, 0), user_signature(cfg, 1))

    def test_samples_scatter_around_signature(self):
        cfg = SynthConfig(n_users=1, samples_per_user=400, length=30, n_channels=1,
                          jitter_std=0.2, seed=13)
        ds = generate(cfg)
        stack = np.stack([s.signal.values for s in ds.samples_for("u000")])
        residual = stack - user_signature(cfg, 0)[None, :, :]
        assert abs(residual.mean()) < 0.01
        assert residual.std() == pytest.approx(0.2, abs=0.01)

    def test_rounding_quantizes_values(self):
        cfg = SynthConfig(n_users=1, samples_per_user=1, length=20, round_decimals=2, seed=0)
        ds = generate(cfg)
        values = ds.samples[0].signal.values
        assert np.array_equal(values, np.round(values, 2))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SynthConfig(n_users=0)
        with pytest.raises(ValueError):
            SynthConfig(jitter_std=-0.1)
        with pytest.raises(ValueError):
            SynthConfig(freq_range_hz=(5.0, 1.0))
