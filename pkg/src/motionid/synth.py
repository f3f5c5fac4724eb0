"""Deterministic synthetic gesture dataset with controllable separability.

Each user gets a fixed signature per channel (a small bank of sinusoids
plus a constant offset); each sample is the signature plus i.i.d.
Gaussian jitter. The signature-distance to jitter ratio controls how
separable users are: jitter_std = 0 makes every sample of a user
identical, jitter_std ~ 0.1 * amplitude is an easy but non-trivial
problem for the evaluation pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import Dataset, GestureSample
from .seeds import derive_seed
from .signals import Signal

_SIGNATURE_TAG = 1
_JITTER_TAG = 2


@dataclass(frozen=True)
class SynthConfig:
    """Shape and randomness of the generated dataset.

    amplitude scales the per-sinusoid amplitudes (drawn uniformly in
    [0.5, 1.5] * amplitude) and the per-channel constant offsets (uniform
    in +/- offset_scale * amplitude). jitter_std is in absolute signal
    units. round_decimals, when set, quantizes values (keeps serialized
    files small); None keeps full precision.
    """

    n_users: int = 100
    samples_per_user: int = 200
    length: int = 150
    n_channels: int = 6
    sample_rate_hz: float = 100.0
    n_components: int = 4
    freq_range_hz: tuple[float, float] = (1.0, 10.0)
    amplitude: float = 1.0
    offset_scale: float = 1.5
    jitter_std: float = 0.1
    round_decimals: int | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("n_users", "samples_per_user", "n_channels", "n_components"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.length < 2:
            raise ValueError(f"length must be >= 2, got {self.length}")
        if self.jitter_std < 0:
            raise ValueError(f"jitter_std must be >= 0, got {self.jitter_std}")
        if not (self.sample_rate_hz > 0 and self.amplitude > 0):
            raise ValueError("sample_rate_hz and amplitude must be positive")
        if not 0 < self.freq_range_hz[0] <= self.freq_range_hz[1]:
            raise ValueError(f"bad frequency range {self.freq_range_hz}")


def user_signature(cfg: SynthConfig, user_index: int) -> np.ndarray:
    """The noise-free (n_channels, length) signature of one user."""
    rng = np.random.default_rng(derive_seed(cfg.seed, _SIGNATURE_TAG, user_index))
    c, k = cfg.n_channels, cfg.n_components
    freqs = rng.uniform(cfg.freq_range_hz[0], cfg.freq_range_hz[1], size=(c, k))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(c, k))
    amps = rng.uniform(0.5, 1.5, size=(c, k)) * cfg.amplitude
    offsets = rng.uniform(-1.0, 1.0, size=(c, 1)) * cfg.offset_scale * cfg.amplitude
    t = np.arange(cfg.length) / cfg.sample_rate_hz
    waves = amps[:, :, None] * np.sin(2.0 * np.pi * freqs[:, :, None] * t + phases[:, :, None])
    return offsets + waves.sum(axis=1)


def generate(cfg: SynthConfig) -> Dataset:
    """Generate the full dataset; bit-identical for identical configs."""
    samples = []
    for u in range(cfg.n_users):
        signature = user_signature(cfg, u)
        jitter_rng = np.random.default_rng(derive_seed(cfg.seed, _JITTER_TAG, u))
        jitter = jitter_rng.normal(
            0.0, cfg.jitter_std, size=(cfg.samples_per_user, cfg.n_channels, cfg.length)
        )
        values = signature[None, :, :] + jitter
        if cfg.round_decimals is not None:
            values = np.round(values, cfg.round_decimals)
        user_id = f"u{u:03d}"
        for event in range(cfg.samples_per_user):
            samples.append(
                GestureSample(
                    user_id=user_id,
                    event_index=event,
                    signal=Signal(values[event], sample_rate_hz=cfg.sample_rate_hz),
                )
            )
    return Dataset(samples)
