"""Training-time augmentations for windowed motion signals.

Five methods:

1. additive Gaussian noise (per sample, per channel)
2. temporal scaling: resample by a factor, then center-crop (factor > 1)
   or zero-pad (factor < 1) back to the original length
3. intensity scaling: multiply all values by a factor
4. left-to-right warping: stretch the left side of the window, contract
   the right, around two random cut points
5. right-to-left warping: the mirrored remapping with the same cut points

``apply_plan`` expands a training set with augmented copies at a
configurable original:augmented ratio. All randomness flows through
per-sample seeds derived from the plan seed, so plans are reproducible
and order-independent. Evaluation data must never pass through here;
the experiment protocol only augments training samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .seeds import derive_seed
from .signals import Signal, TimeMap, apply_time_map, resample_linear

# Parameter grids used by the replication sweep.
NOISE_SIGMA_GRID = (0.0125, 0.025, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
TIME_FACTOR_GRID = (0.8, 0.9, 0.95, 0.975, 0.9875, 1.0125, 1.025, 1.05, 1.1, 1.2)
INTENSITY_FACTOR_GRID = (0.8, 0.9, 0.95, 0.975, 0.9875, 1.0125, 1.025, 1.05, 1.1, 1.2)


class Method(str, Enum):
    """Augmentation method identifiers (values double as CLI names)."""

    NOISE = "noise"
    TEMPORAL = "temporal"
    INTENSITY = "intensity"
    WARP_LR = "warp-lr"
    WARP_RL = "warp-rl"


WARP_DIRECTIONS = ("lr", "rl")


@dataclass(frozen=True)
class AugmentationSpec:
    """One augmentation method plus the parameters it consults.

    Only the fields relevant to ``method`` are read: noise uses
    mean/sigma, temporal uses time_factor, intensity uses
    intensity_factor, and warping draws fresh random cut points per
    sample (no fixed parameter).
    """

    method: Method
    mean: float = 0.0
    sigma: float = 0.0
    time_factor: float = 1.0
    intensity_factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.time_factor <= 0:
            raise ValueError(f"time_factor must be > 0, got {self.time_factor}")
        if self.intensity_factor <= 0:
            raise ValueError(f"intensity_factor must be > 0, got {self.intensity_factor}")


@dataclass(frozen=True)
class AugmentationPlan:
    """Ordered augmentation specs plus the copy ratio and RNG seed.

    ratio is the fraction of training samples that receive one augmented
    copy (1.0 = every sample, 0.5 = every second sample starting at index
    0). Plans with more than one spec apply all of them, in order, to the
    same copy (combined augmentation).
    """

    specs: tuple[AugmentationSpec, ...]
    ratio: float = 1.0
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise ValueError("an augmentation plan needs at least one spec")
        if not self.ratio > 0:
            raise ValueError(f"ratio must be > 0, got {self.ratio}")


@dataclass(frozen=True)
class WarpCuts:
    """Two cut points for warping a length-n window.

    t1 lies in [n//4, n//2] and t2 in [n//2, (3*n)//4], both inclusive.
    """

    t1: int
    t2: int
    n: int

    def __post_init__(self):
        n = self.n
        if n < 8:
            raise ValueError(f"warp cuts need n >= 8, got {n}")
        if not n // 4 <= self.t1 <= n // 2:
            raise ValueError(f"t1={self.t1} outside [{n // 4}, {n // 2}] for n={n}")
        if not n // 2 <= self.t2 <= (3 * n) // 4:
            raise ValueError(f"t2={self.t2} outside [{n // 2}, {(3 * n) // 4}] for n={n}")


def add_random_noise(signal: Signal, mean: float, sigma: float, rng: np.random.Generator) -> Signal:
    """Add i.i.d. Gaussian noise to every sample of every channel."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    noise = rng.normal(mean, sigma, size=signal.values.shape)
    return signal.with_values(signal.values + noise)


def temporal_scale(signal: Signal, factor: float) -> Signal:
    """Stretch or contract the time axis, preserving the window length.

    The signal is resampled to round(n * factor) samples (round half away
    from zero). factor > 1 center-crops back to n, dropping
    floor((m - n) / 2) leading samples and the rest trailing; factor < 1
    zero-pads, floor((n - m) / 2) on the left and the remainder on the
    right; factor = 1 is the identity.
    """
    if factor <= 0:
        raise ValueError(f"temporal scaling factor must be > 0, got {factor}")
    n = signal.length
    m = int(math.floor(n * factor + 0.5))
    if m < 2:
        raise ValueError(f"factor {factor} shrinks length {n} below 2 samples")
    if m == n:
        return signal
    rescaled = resample_linear(signal, m)
    if m > n:
        lead = (m - n) // 2
        return signal.with_values(rescaled.values[:, lead:lead + n])
    pad_left = (n - m) // 2
    out = np.zeros((signal.n_channels, n))
    out[:, pad_left:pad_left + m] = rescaled.values
    return signal.with_values(out)


def intensity_scale(signal: Signal, factor: float) -> Signal:
    """Multiply every signal value by ``factor``."""
    if factor <= 0:
        raise ValueError(f"intensity scaling factor must be > 0, got {factor}")
    return signal.with_values(signal.values * factor)


def draw_warp_cuts(n: int, rng: np.random.Generator) -> WarpCuts:
    """Draw the two warp cut points, uniform over their integer ranges."""
    if n < 8:
        raise ValueError(f"warping needs a signal of length >= 8, got {n}")
    t1 = int(rng.integers(n // 4, n // 2, endpoint=True))
    t2 = int(rng.integers(n // 2, (3 * n) // 4, endpoint=True))
    return WarpCuts(t1=t1, t2=t2, n=n)


def warp(signal: Signal, direction: str, cuts: WarpCuts) -> Signal:
    """Warp one side of the window into the other around the cut points.

    direction "lr" stretches the source segment [0, t1] to fill [0, t2]
    and contracts [t1, n-1] into [t2, n-1]; "rl" uses the transposed knot
    (t2 -> t1), contracting the left side and stretching the right. When
    t1 == t2 the map is the identity.
    """
    n = signal.length
    if cuts.n != n:
        raise ValueError(f"cuts drawn for length {cuts.n}, signal has length {n}")
    if direction == "lr":
        mid = (float(cuts.t1), float(cuts.t2))
    elif direction == "rl":
        mid = (float(cuts.t2), float(cuts.t1))
    else:
        raise ValueError(f"warp direction must be 'lr' or 'rl', got {direction!r}")
    knots = ((0.0, 0.0), mid, (float(n - 1), float(n - 1)))
    return apply_time_map(signal, TimeMap(knots))


def augment_once(signal: Signal, spec: AugmentationSpec, rng: np.random.Generator) -> Signal:
    """Apply a single augmentation spec to one signal."""
    if spec.method is Method.NOISE:
        return add_random_noise(signal, spec.mean, spec.sigma, rng)
    if spec.method is Method.TEMPORAL:
        return temporal_scale(signal, spec.time_factor)
    if spec.method is Method.INTENSITY:
        return intensity_scale(signal, spec.intensity_factor)
    if spec.method is Method.WARP_LR:
        return warp(signal, "lr", draw_warp_cuts(signal.length, rng))
    if spec.method is Method.WARP_RL:
        return warp(signal, "rl", draw_warp_cuts(signal.length, rng))
    raise ValueError(f"unknown augmentation method {spec.method!r}")


def copy_indices(n_samples: int, ratio: float) -> list[int]:
    """Indices of the samples that receive an augmented copy.

    ceil(ratio * n) copies; copy j augments the sample at floor(j / ratio),
    which selects every second sample (starting at index 0) for ratio 0.5
    and every sample for ratio 1.0.
    """
    n_copies = math.ceil(ratio * n_samples)
    return [min(int(j / ratio), n_samples - 1) for j in range(n_copies)]


def apply_plan(signals: Sequence[Signal], plan: AugmentationPlan) -> list[Signal]:
    """Return the originals followed by their augmented copies.

    The copy of sample i gets seed derive_seed(base_seed, i, r, k) for
    spec ordinal k (r counts repeated copies of the same sample and is 0
    for every ratio <= 1), so output is deterministic in the plan seed
    and independent of processing order. Inputs are never mutated.
    """
    if len(signals) == 0:
        raise ValueError("cannot augment an empty training set")
    out = list(signals)
    seen: dict[int, int] = {}
    for src_idx in copy_indices(len(signals), plan.ratio):
        repeat = seen.get(src_idx, 0)
        seen[src_idx] = repeat + 1
        augmented = signals[src_idx]
        for k, spec in enumerate(plan.specs):
            rng = np.random.default_rng(derive_seed(plan.base_seed, src_idx, repeat, k))
            augmented = augment_once(augmented, spec, rng)
        out.append(augmented)
    return out
