"""Fixed-dimension feature vectors for signals.

Two providers:

* ``statistical`` computes 10 descriptors per channel directly from the
  signal, so it also works on augmented copies. Per-channel order:
  mean, std, min, max, rms, mean |first difference|, skewness, excess
  kurtosis, zero-crossing rate, interquartile range. D = 10 * n_channels.
* ``table:<path>`` looks precomputed vectors up by (user_id, event_index),
  for plugging in embeddings produced by an external network. Augmented
  signals have no table entry, so table providers cannot be combined with
  augmentation; the protocol layer enforces that.

Conventions pinned for reproducibility: std is the population standard
deviation; skewness and excess kurtosis are the biased moment ratios and
both defined as 0 for zero-variance channels; zero crossings count
strictly-opposite-sign adjacent pairs, divided by the window length;
quartiles use linear interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import Signal

FEATURE_NAMES = ("mean", "std", "min", "max", "rms", "mad1", "skew", "kurt", "zcr", "iqr")


@dataclass(frozen=True, eq=False)
class Embedding:
    """Feature vector for one signal, tagged with its provider."""

    vector: np.ndarray
    provider: str

    def __post_init__(self):
        vec = np.array(self.vector, dtype=np.float64)
        if vec.ndim != 1:
            raise ValueError(f"embedding vector must be 1-D, got shape {vec.shape}")
        if not np.isfinite(vec).all():
            raise ValueError("embedding contains non-finite values")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


def batch_statistical_features(values: np.ndarray) -> np.ndarray:
    """Statistical features for a batch of windows.

    values: (n_signals, n_channels, length) array.
    Returns (n_signals, 10 * n_channels), channels concatenated in order.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"expected (signals, channels, time), got shape {x.shape}")
    n = x.shape[2]
    mean = x.mean(axis=2)
    std = x.std(axis=2)
    lo = x.min(axis=2)
    hi = x.max(axis=2)
    rms = np.sqrt(np.mean(x * x, axis=2))
    mad1 = np.abs(np.diff(x, axis=2)).mean(axis=2)
    centered = x - mean[..., None]
    m3 = np.mean(centered**3, axis=2)
    m4 = np.mean(centered**4, axis=2)
    nonzero = std > 0
    skew = np.divide(m3, std**3, out=np.zeros_like(m3), where=nonzero)
    kurt = np.divide(m4, std**4, out=np.zeros_like(m4), where=nonzero) - 3.0
    kurt[~nonzero] = 0.0
    zcr = np.count_nonzero(x[..., :-1] * x[..., 1:] < 0, axis=2) / n
    q75, q25 = np.percentile(x, [75, 25], axis=2)
    iqr = q75 - q25
    feats = np.stack([mean, std, lo, hi, rms, mad1, skew, kurt, zcr, iqr], axis=2)
    return feats.reshape(x.shape[0], -1)


def extract_statistical(signal: Signal) -> Embedding:
    """Statistical feature embedding of one signal (D = 10 * n_channels)."""
    vec = batch_statistical_features(signal.values[None, :, :])[0]
    return Embedding(vector=vec, provider="statistical")


@dataclass(frozen=True)
class EmbeddingTable:
    """Precomputed embeddings keyed by (user_id, event_index)."""

    vectors: dict
    dim: int

    def __len__(self) -> int:
        return len(self.vectors)


def lookup_embedding(table: EmbeddingTable, key: tuple[str, int]) -> Embedding:
    """Fetch the stored vector for one sample key."""
    try:
        vec = table.vectors[key]
    except KeyError:
        raise KeyError(f"no embedding for user_id={key[0]!r}, event_index={key[1]}") from None
    return Embedding(vector=vec, provider="table")


class StatisticalProvider:
    """Signal-domain provider: features computed from the window itself."""

    name = "statistical"
    supports_signals = True

    def embed_signals(self, signals) -> np.ndarray:
        """Feature matrix (n_signals, D) for a sequence of same-shape signals."""
        stacked = np.stack([s.values for s in signals])
        return batch_statistical_features(stacked)

    def embed_samples(self, samples) -> np.ndarray:
        return self.embed_signals([s.signal for s in samples])


class TableProvider:
    """Lookup provider over an externally computed embedding table."""

    supports_signals = False

    def __init__(self, table: EmbeddingTable, name: str = "table"):
        self.table = table
        self.name = name

    def embed_signals(self, signals):
        raise LookupError(
            "table embeddings are keyed by (user_id, event_index) and cannot "
            "embed transformed signals; use the statistical provider for "
            "augmentation experiments"
        )

    def embed_samples(self, samples) -> np.ndarray:
        rows = [lookup_embedding(self.table, (s.user_id, s.event_index)).vector for s in samples]
        return np.stack(rows)
