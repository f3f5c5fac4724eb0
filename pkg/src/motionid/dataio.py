"""On-disk formats for windowed gesture samples and embedding tables.

Both formats are UTF-8 comma-separated text with a required header row;
floats may use decimal or scientific notation (always '.' as the decimal
mark). Values are written with shortest round-trip repr, so
write -> load is lossless.

Windowed-sample file, one row per channel per sample::

    # sample_rate_hz: 100.0
    user_id,event_index,channel,v1,...,vN
    u000,0,0,0.12,-0.4,...

The optional leading comment carries the sampling rate (default 100.0).
Every sample must provide channels 0..C-1 with the same N everywhere.

Embedding file, one row per sample::

    user_id,event_index,e1,...,eD
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataFormatError
from .features import EmbeddingTable
from .signals import Signal

DEFAULT_SAMPLE_RATE_HZ = 100.0


@dataclass(frozen=True, eq=False)
class GestureSample:
    """One tap-gesture window attributed to a user."""

    user_id: str
    event_index: int
    signal: Signal

    def __post_init__(self):
        if self.event_index < 0:
            raise ValueError(f"event_index must be >= 0, got {self.event_index}")
        for bad in (",", "\n", "\r"):
            if bad in self.user_id:
                raise ValueError(f"user_id may not contain {bad!r}: {self.user_id!r}")

    @property
    def key(self) -> tuple[str, int]:
        return (self.user_id, self.event_index)


class Dataset:
    """Validated collection of gesture samples sharing one window shape.

    Sample keys (user_id, event_index) are unique; all signals share
    (n_channels, length, sample_rate_hz). Users are ordered by first
    appearance. Immutable once constructed.
    """

    def __init__(self, samples: Sequence[GestureSample]):
        samples = tuple(samples)
        if not samples:
            raise ValueError("dataset has no samples")
        first = samples[0].signal
        users: dict[str, None] = {}
        seen: set[tuple[str, int]] = set()
        by_user: dict[str, list[GestureSample]] = {}
        for s in samples:
            if s.key in seen:
                raise ValueError(f"duplicate sample key {s.key}")
            seen.add(s.key)
            sig = s.signal
            if (sig.n_channels, sig.length) != (first.n_channels, first.length):
                raise ValueError(
                    f"sample {s.key} has shape ({sig.n_channels}, {sig.length}), "
                    f"dataset uses ({first.n_channels}, {first.length})"
                )
            if sig.sample_rate_hz != first.sample_rate_hz:
                raise ValueError(
                    f"sample {s.key} has sample rate {sig.sample_rate_hz}, "
                    f"dataset uses {first.sample_rate_hz}"
                )
            users.setdefault(s.user_id, None)
            by_user.setdefault(s.user_id, []).append(s)
        self.samples = samples
        self.users = tuple(users)
        self._by_user = {
            u: tuple(sorted(v, key=lambda s: s.event_index)) for u, v in by_user.items()
        }

    @property
    def n_channels(self) -> int:
        return self.samples[0].signal.n_channels

    @property
    def length(self) -> int:
        return self.samples[0].signal.length

    @property
    def sample_rate_hz(self) -> float:
        return self.samples[0].signal.sample_rate_hz

    def samples_for(self, user_id: str) -> tuple[GestureSample, ...]:
        """All samples of one user, sorted by event_index."""
        return self._by_user[user_id]

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        if len(self) != len(other) or self.users != other.users:
            return False
        return all(
            a.key == b.key
            and a.signal.sample_rate_hz == b.signal.sample_rate_hz
            and np.array_equal(a.signal.values, b.signal.values)
            for a, b in zip(self.samples, other.samples)
        )


def _data_lines(path) -> Iterable[tuple[int, str]]:
    """Yield (1-based line number, stripped content) for non-blank lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line:
                yield lineno, line


def _parse_floats(fields: list[str], path, lineno: int) -> np.ndarray:
    try:
        return np.array(fields, dtype=np.float64)
    except ValueError:
        for f in fields:
            try:
                float(f)
            except ValueError:
                raise DataFormatError(f"non-numeric value {f!r}", path, lineno) from None
        raise DataFormatError("unparseable numeric row", path, lineno) from None


def _parse_int(field: str, what: str, path, lineno: int) -> int:
    try:
        value = int(field)
    except ValueError:
        raise DataFormatError(f"{what} must be an integer, got {field!r}", path, lineno) from None
    if value < 0:
        raise DataFormatError(f"{what} must be >= 0, got {value}", path, lineno)
    return value


def load_dataset(path) -> Dataset:
    """Read a windowed-sample file and return a validated Dataset."""
    sample_rate = DEFAULT_SAMPLE_RATE_HZ
    header = None
    n_values = 0
    # key -> channel -> values; insertion order gives first-appearance order
    rows: dict[tuple[str, int], dict[int, np.ndarray]] = {}
    last_line: dict[tuple[str, int], int] = {}
    for lineno, line in _data_lines(path):
        if line.startswith("#"):
            if header is None and "sample_rate_hz" in line:
                try:
                    sample_rate = float(line.split(":", 1)[1])
                except (IndexError, ValueError):
                    raise DataFormatError("malformed sample_rate_hz comment", path, lineno) from None
            continue
        fields = line.split(",")
        if header is None:
            if fields[:3] != ["user_id", "event_index", "channel"] or len(fields) < 4:
                raise DataFormatError(
                    "header must be 'user_id,event_index,channel,v1,...'", path, lineno
                )
            header = fields
            n_values = len(fields) - 3
            continue
        if len(fields) != len(header):
            raise DataFormatError(
                f"expected {len(header)} columns, got {len(fields)}", path, lineno
            )
        user_id = fields[0]
        event = _parse_int(fields[1], "event_index", path, lineno)
        channel = _parse_int(fields[2], "channel", path, lineno)
        values = _parse_floats(fields[3:], path, lineno)
        key = (user_id, event)
        channels = rows.setdefault(key, {})
        if channel in channels:
            raise DataFormatError(f"duplicate row for {key} channel {channel}", path, lineno)
        channels[channel] = values
        last_line[key] = lineno
    if header is None:
        raise DataFormatError("no header row", path)
    if not rows:
        raise DataFormatError("no samples", path)
    n_channels = len(next(iter(rows.values())))
    samples = []
    for key, channels in rows.items():
        if sorted(channels) != list(range(n_channels)):
            raise DataFormatError(
                f"sample {key} has channels {sorted(channels)}, expected 0..{n_channels - 1}",
                path,
                last_line[key],
            )
        values = np.vstack([channels[c] for c in range(n_channels)])
        try:
            signal = Signal(values, sample_rate_hz=sample_rate)
        except ValueError as exc:
            raise DataFormatError(f"sample {key}: {exc}", path, last_line[key]) from None
        samples.append(GestureSample(user_id=key[0], event_index=key[1], signal=signal))
    if n_values < 2:
        raise DataFormatError("windows need at least 2 samples per channel", path)
    return Dataset(samples)


def write_dataset(dataset: Dataset, path) -> None:
    """Serialize a Dataset in the windowed-sample format (lossless)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# sample_rate_hz: {dataset.sample_rate_hz!r}\n")
        cols = ",".join(f"v{i + 1}" for i in range(dataset.length))
        fh.write(f"user_id,event_index,channel,{cols}\n")
        for s in dataset.samples:
            for c in range(s.signal.n_channels):
                row = ",".join(repr(v) for v in s.signal.values[c].tolist())
                fh.write(f"{s.user_id},{s.event_index},{c},{row}\n")


def load_embeddings(path) -> EmbeddingTable:
    """Read an embedding file into a table keyed by (user_id, event_index)."""
    header = None
    dim = 0
    vectors: dict[tuple[str, int], np.ndarray] = {}
    for lineno, line in _data_lines(path):
        if line.startswith("#"):
            continue
        fields = line.split(",")
        if header is None:
            if fields[:2] != ["user_id", "event_index"] or len(fields) < 3:
                raise DataFormatError("header must be 'user_id,event_index,e1,...'", path, lineno)
            header = fields
            dim = len(fields) - 2
            continue
        if len(fields) != len(header):
            raise DataFormatError(
                f"expected {len(header)} columns, got {len(fields)}", path, lineno
            )
        key = (fields[0], _parse_int(fields[1], "event_index", path, lineno))
        if key in vectors:
            raise DataFormatError(f"duplicate embedding key {key}", path, lineno)
        vec = _parse_floats(fields[2:], path, lineno)
        if not np.isfinite(vec).all():
            raise DataFormatError(f"embedding {key} contains non-finite values", path, lineno)
        vec.setflags(write=False)
        vectors[key] = vec
    if header is None:
        raise DataFormatError("no header row", path)
    if not vectors:
        raise DataFormatError("no embeddings", path)
    return EmbeddingTable(vectors=vectors, dim=dim)


def write_embeddings(table: EmbeddingTable, path) -> None:
    """Serialize an embedding table (lossless, insertion order)."""
    with open(path, "w", encoding="utf-8") as fh:
        cols = ",".join(f"e{i + 1}" for i in range(table.dim))
        fh.write(f"user_id,event_index,{cols}\n")
        for (user_id, event), vec in table.vectors.items():
            row = ",".join(repr(v) for v in vec.tolist())
            fh.write(f"{user_id},{event},{row}\n")
