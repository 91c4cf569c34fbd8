"""Counter-based deterministic randomness.

Every random decision is a pure function of (seed, stream, counter): the
splitmix64 finalizer applied to ``seed ^ mix(stream)`` advanced by the
counter.  Point-wise decisions use the point index as the counter, so the
outcome of a stage does not depend on evaluation order and stages can be
replayed or parallelized without changing their output.

Bernoulli decisions compare a word against a fixed-point threshold
``round(p * 2**64)``; a probability of one clamps to the always-true
threshold 2**64.  Uniform draws use rejection against the largest multiple
of n below 2**64 and advance the counter on every rejection.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import SamplingFailure

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

MAX_REJECTIONS = 64

# Stream ids, one per consumer.  Values are part of the reproducibility
# contract and must not be reused across stages.
STREAM_ATTEMPT = 1
STREAM_MEMBERSHIP = 2
STREAM_QUADRICS = 3
STREAM_PATCH = 4
STREAM_THIN = 5
STREAM_AUGMENT = 6
STREAM_TRIAL = 7
STREAM_COEFFS = 8


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def word(seed: int, stream: int, counter: int) -> int:
    """The 64-bit word at position ``counter`` of the given stream."""
    base = (seed ^ mix64(stream)) & MASK64
    return mix64((base + (counter + 1) * _GAMMA) & MASK64)


def _mix64_arr(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def words(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """Vectorized ``word`` over an array of counters."""
    base = np.uint64((seed ^ mix64(stream)) & MASK64)
    c = counters.astype(np.uint64) + np.uint64(1)
    return _mix64_arr(base + c * np.uint64(_GAMMA))


def bernoulli_threshold(p: float) -> int:
    """Fixed-point threshold in [0, 2**64] for a Bernoulli(p) decision."""
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return 1 << 64
    t = int(round(p * 2.0**64))
    return min(max(t, 0), 1 << 64)


def bernoulli(seed: int, stream: int, counter: int, threshold: int) -> bool:
    if threshold >= 1 << 64:
        return True
    return word(seed, stream, counter) < threshold


def bernoulli_mask(seed: int, stream: int, n: int, threshold: int) -> np.ndarray:
    """Boolean mask of n Bernoulli decisions at counters 0..n-1."""
    if threshold >= 1 << 64:
        return np.ones(n, dtype=bool)
    if threshold <= 0:
        return np.zeros(n, dtype=bool)
    return words(seed, stream, np.arange(n)) < np.uint64(threshold)


def uniform_below(seed: int, stream: int, counter: int, n: int) -> tuple[int, int]:
    """Uniform draw in [0, n) by rejection.

    Returns (value, next_counter).  Raises SamplingFailure if the rejection
    budget is exhausted, which for any n < 2**63 is astronomically unlikely.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    limit = ((1 << 64) // n) * n
    for _ in range(MAX_REJECTIONS):
        w = word(seed, stream, counter)
        counter += 1
        if w < limit:
            return w % n, counter
    raise SamplingFailure(f"uniform_below({n}) rejected {MAX_REJECTIONS} words")


def uniform_array(
    seed: int, stream: int, counter: int, count: int, n: int
) -> tuple[np.ndarray, int]:
    """count uniform draws in [0, n), vectorized.  Returns (values, next_counter)."""
    if n <= 0:
        raise ValueError("n must be positive")
    limit = np.uint64(((1 << 64) // n) * n)
    vals = words(seed, stream, np.arange(counter, counter + count))
    counter += count
    bad = np.nonzero(vals >= limit)[0]
    for _ in range(MAX_REJECTIONS):
        if bad.size == 0:
            return (vals % np.uint64(n)).astype(np.int64), counter
        redraw = words(seed, stream, np.arange(counter, counter + bad.size))
        counter += bad.size
        vals[bad] = redraw
        bad = bad[redraw >= limit]
    raise SamplingFailure(f"uniform_array({n}) rejected {MAX_REJECTIONS} rounds")


class Stream:
    """Sequential draws from one (seed, stream) lane, tracking the counter."""

    def __init__(self, seed: int, stream: int, transcript: "Transcript | None" = None):
        self.seed = seed
        self.stream = stream
        self.counter = 0
        self.transcript = transcript

    def next_word(self) -> int:
        w = word(self.seed, self.stream, self.counter)
        self.counter += 1
        if self.transcript is not None:
            self.transcript.record("word", self.stream, self.counter, w)
        return w

    def uniform(self, n: int) -> int:
        v, self.counter = uniform_below(self.seed, self.stream, self.counter, n)
        if self.transcript is not None:
            self.transcript.record("unif", self.stream, self.counter, n, v)
        return v

    def bernoulli(self, threshold: int) -> bool:
        out = bernoulli(self.seed, self.stream, self.counter, threshold)
        self.counter += 1
        if self.transcript is not None:
            self.transcript.record(
                "bern", self.stream, self.counter, threshold & MASK64, int(out)
            )
        return out


class Transcript:
    """Running digest of every randomness consumption in a construction.

    The hex digest ends up in the run trace, so two runs that claim the same
    seed can be checked to have made identical random decisions.
    """

    def __init__(self):
        self._h = hashlib.sha256()

    def record(self, tag: str, *values: int, payload: bytes = b"") -> None:
        head = tag + ":" + ",".join(str(v) for v in values) + ";"
        self._h.update(head.encode("ascii"))
        if payload:
            self._h.update(payload)

    def record_mask(self, tag: str, stream: int, threshold: int, mask: np.ndarray) -> None:
        self.record(
            tag,
            stream,
            threshold & MASK64,
            mask.size,
            payload=np.packbits(mask).tobytes(),
        )

    def digest(self) -> str:
        return self._h.hexdigest()


def derive_seed(seed: int, stream: int, index: int) -> int:
    """Stable sub-seed for attempt or trial number ``index``."""
    return word(seed, stream, index)
