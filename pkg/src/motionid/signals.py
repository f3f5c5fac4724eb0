"""Fixed-length multi-channel sensor windows and linear time-axis operations.

A window holds one tap gesture as a ``(n_channels, length)`` float64 array,
e.g. 6 channels (3 accelerometer + 3 gyroscope axes) of ~150 samples at
~100 Hz. Resampling and piecewise-linear time remapping are the two
primitives every time-domain augmentation is built from. Both use linear
interpolation with endpoint-aligned index mapping: position ``j`` of an
``m``-point output grid reads the input at ``j * (n - 1) / (m - 1)``, so
``m == n`` is an exact identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Signal:
    """One windowed multi-channel sensor recording.

    values: ``(n_channels, length)`` float64 array; stored read-only so a
        signal can be shared freely (augmentations always allocate).
    sample_rate_hz: nominal sampling rate, carried for provenance; none of
        the index-space math depends on it.
    """

    values: np.ndarray
    sample_rate_hz: float = 100.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"signal values must be 2-D (channels, time), got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise ValueError(f"need >= 1 channel and >= 2 samples, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("signal contains non-finite values")
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray) -> "Signal":
        """New signal with the same sample rate and different values."""
        return Signal(values, sample_rate_hz=self.sample_rate_hz)


@dataclass(frozen=True, eq=True)
class TimeMap:
    """Piecewise-linear monotone remapping of the time axis.

    knots: ``(source_index, target_index)`` pairs, strictly increasing in
        both coordinates. The map sends source position ``s`` to target
        position ``t`` by linear interpolation between knots.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple((float(s), float(t)) for s, t in self.knots)
        if len(knots) < 2:
            raise ValueError("a time map needs at least 2 knots")
        src = np.array([k[0] for k in knots])
        tgt = np.array([k[1] for k in knots])
        if not (np.all(np.diff(src) > 0) and np.all(np.diff(tgt) > 0)):
            raise ValueError(f"time map knots must be strictly increasing in both coordinates: {knots}")
        object.__setattr__(self, "knots", knots)

    @classmethod
    def identity(cls, length: int) -> "TimeMap":
        return cls(((0.0, 0.0), (float(length - 1), float(length - 1))))

    def source_positions(self, target_indices: np.ndarray) -> np.ndarray:
        """Invert the map: the source position that lands on each target index."""
        src = np.array([k[0] for k in self.knots])
        tgt = np.array([k[1] for k in self.knots])
        return np.interp(target_indices, tgt, src)


def resample_linear(signal: Signal, new_length: int) -> Signal:
    """Resample every channel to ``new_length`` samples by linear interpolation.

    Endpoints align: output position j reads the input at j*(n-1)/(m-1),
    so the first and last sample of each channel are preserved exactly and
    ``new_length == signal.length`` returns the input unchanged.
    """
    if new_length < 2:
        raise ValueError(f"new_length must be >= 2, got {new_length}")
    n = signal.length
    if new_length == n:
        return signal
    positions = np.arange(new_length) * ((n - 1) / (new_length - 1))
    grid = np.arange(n, dtype=np.float64)
    out = np.empty((signal.n_channels, new_length))
    for c in range(signal.n_channels):
        out[c] = np.interp(positions, grid, signal.values[c])
    # guard the last position against float rounding past n-1
    out[:, 0] = signal.values[:, 0]
    out[:, -1] = signal.values[:, -1]
    return signal.with_values(out)


def apply_time_map(signal: Signal, time_map: TimeMap) -> Signal:
    """Warp a signal along the time axis, keeping its length.

    Output sample ``j`` of each channel is the channel linearly
    interpolated at the source position the map sends to target index
    ``j``; every output value is therefore a convex combination of two
    input values. The map's target range must cover ``[0, length - 1]``.
    """
    n = signal.length
    if time_map.knots[0][1] > 0.0 or time_map.knots[-1][1] < n - 1:
        raise ValueError(
            f"time map target range [{time_map.knots[0][1]}, {time_map.knots[-1][1]}] "
            f"does not span [0, {n - 1}]"
        )
    positions = time_map.source_positions(np.arange(n, dtype=np.float64))
    grid = np.arange(n, dtype=np.float64)
    out = np.empty((signal.n_channels, n))
    for c in range(signal.n_channels):
        out[c] = np.interp(positions, grid, signal.values[c])
    return signal.with_values(out)
