import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.interpolate import interp1d

from motionid import Signal, TimeMap, apply_time_map, resample_linear

from conftest import make_signal


def scipy_resample(values: np.ndarray, new_length: int) -> np.ndarray:
    """Independent endpoint-aligned linear resampling oracle."""
    n = values.shape[1]
    positions = np.linspace(0.0, n - 1, new_length)
    return interp1d(np.arange(n), values, kind="linear", axis=1)(positions)


class TestSignal:
    def test_shape_and_properties(self):
        s = Signal([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], sample_rate_hz=50.0)
        assert s.n_channels == 2
        assert s.length == 3
        assert s.sample_rate_hz == 50.0

    def test_values_are_read_only(self):
        s = Signal([[1.0, 2.0]])
        with pytest.raises(ValueError):
            s.values[0, 0] = 9.0

    @pytest.mark.parametrize(
        "values",
        [
            [[1.0]],  # too short
            [],  # no channels
            [[1.0, np.nan]],
            [[1.0, np.inf]],
            [1.0, 2.0],  # 1-D
        ],
    )
    def test_rejects_invalid_values(self, values):
        with pytest.raises(ValueError):
            Signal(values)

    def test_rejects_bad_sample_rate(self):
        with pytest.raises(ValueError):
            Signal([[1.0, 2.0]], sample_rate_hz=0.0)


class TestResampleLinear:
    def test_midpoint_of_ramp(self):
        out = resample_linear(Signal([[0.0, 2.0]]), 3)
        assert out.values.tolist() == [[0.0, 1.0, 2.0]]

    def test_same_length_is_identity(self, rng):
        s = make_signal(rng)
        out = resample_linear(s, s.length)
        assert np.array_equal(out.values, s.values)

    def test_hand_derived_upsample(self):
        # positions {0, 0.5, 1, 1.5, 2, 2.5, 3} on the piecewise-linear [0, 1, 4, 9]
        out = resample_linear(Signal([[0.0, 1.0, 4.0, 9.0]]), 7)
        expected = [0.0, 0.5, 1.0, 2.5, 4.0, 6.5, 9.0]
        np.testing.assert_allclose(out.values[0], expected, rtol=0, atol=1e-15)
        np.testing.assert_allclose(
            out.values, scipy_resample(np.array([[0.0, 1.0, 4.0, 9.0]]), 7), atol=1e-12
        )

    @given(
        length=st.integers(2, 60),
        new_length=st.integers(2, 90),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_matches_independent_oracle(self, length, new_length, seed):
        s = make_signal(np.random.default_rng(seed), n_channels=2, length=length)
        out = resample_linear(s, new_length)
        assert out.values.shape == (2, new_length)
        np.testing.assert_allclose(out.values, scipy_resample(s.values, new_length), atol=1e-12)

    @given(length=st.integers(2, 50), new_length=st.integers(2, 80), seed=st.integers(0, 2**32 - 1))
    def test_endpoints_preserved_exactly(self, length, new_length, seed):
        s = make_signal(np.random.default_rng(seed), n_channels=3, length=length)
        out = resample_linear(s, new_length)
        assert np.array_equal(out.values[:, 0], s.values[:, 0])
        assert np.array_equal(out.values[:, -1], s.values[:, -1])

    @given(
        slope=st.floats(-5, 5),
        intercept=st.floats(-5, 5),
        length=st.integers(2, 40),
        new_length=st.integers(2, 70),
    )
    def test_exact_on_affine_channels(self, slope, intercept, length, new_length):
        values = slope * np.arange(length) + intercept
        out = resample_linear(Signal([values]), new_length)
        positions = np.arange(new_length) * ((length - 1) / (new_length - 1))
        np.testing.assert_allclose(out.values[0], slope * positions + intercept, atol=1e-10)

    def test_rejects_short_target(self, rng):
        with pytest.raises(ValueError):
            resample_linear(make_signal(rng), 1)


class TestTimeMap:
    def test_identity_round_trips_positions(self):
        tm = TimeMap.identity(5)
        np.testing.assert_array_equal(tm.source_positions(np.arange(5.0)), np.arange(5.0))

    @pytest.mark.parametrize(
        "knots",
        [
            ((0, 0),),  # too few
            ((0, 0), (2, 1), (1, 2)),  # source not increasing
            ((0, 0), (1, 2), (2, 2)),  # target not strictly increasing
        ],
    )
    def test_rejects_non_monotone_knots(self, knots):
        with pytest.raises(ValueError):
            TimeMap(knots)


class TestApplyTimeMap:
    def test_identity_is_exact(self, rng):
        s = make_signal(rng)
        out = apply_time_map(s, TimeMap.identity(s.length))
        assert np.array_equal(out.values, s.values)

    def test_hand_inverted_piecewise_map(self):
        # knots {(0,0),(1,2),(4,4)}: targets {0..4} come from sources {0, .5, 1, 2.5, 4}
        s = Signal([[0.0, 1.0, 2.0, 3.0, 4.0]])
        out = apply_time_map(s, TimeMap(((0, 0), (1, 2), (4, 4))))
        np.testing.assert_allclose(out.values[0], [0.0, 0.5, 1.0, 2.5, 4.0], atol=1e-15)

    def test_matches_independent_oracle(self, rng):
        s = make_signal(rng, n_channels=2, length=30)
        tm = TimeMap(((0, 0), (9, 17), (20, 23), (29, 29)))
        out = apply_time_map(s, tm)
        targets = np.array([k[1] for k in tm.knots])
        sources = np.array([k[0] for k in tm.knots])
        positions = interp1d(targets, sources, kind="linear")(np.arange(30))
        expected = interp1d(np.arange(30), s.values, kind="linear", axis=1)(positions)
        np.testing.assert_allclose(out.values, expected, atol=1e-12)

    @given(constant=st.floats(-100, 100), seed=st.integers(0, 2**32 - 1))
    def test_constant_signal_stays_constant(self, constant, seed):
        rng = np.random.default_rng(seed)
        length = 20
        interior = np.sort(rng.uniform(1, length - 2, size=2))
        tm = TimeMap(((0, 0), (interior[0], interior[1]), (length - 1, length - 1)))
        s = Signal(np.full((2, length), constant))
        out = apply_time_map(s, tm)
        np.testing.assert_array_equal(out.values, s.values)

    @given(seed=st.integers(0, 2**32 - 1))
    def test_output_bounded_by_input_range(self, seed):
        rng = np.random.default_rng(seed)
        s = make_signal(rng, n_channels=3, length=25)
        mid_src = rng.uniform(1, 23)
        mid_tgt = rng.uniform(1, 23)
        out = apply_time_map(s, TimeMap(((0, 0), (mid_src, mid_tgt), (24, 24))))
        for c in range(3):
            assert out.values[c].min() >= s.values[c].min() - 1e-12
            assert out.values[c].max() <= s.values[c].max() + 1e-12

    def test_rejects_map_not_spanning_targets(self, rng):
        s = make_signal(rng, length=10)
        with pytest.raises(ValueError):
            apply_time_map(s, TimeMap(((0, 0), (9, 5))))
