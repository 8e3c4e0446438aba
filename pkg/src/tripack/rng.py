"""Deterministic randomness for reproducible trials.

Everything here is counter-based splitmix64: the k-th draw of a stream is a
pure function of (seed, k), so edge presence and trial outcomes are bit-exact
across platforms and independent of worker scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK64
    return x ^ (x >> 31)


def derive(seed: int, *tags) -> int:
    """Child seed for an independent stream, keyed by (seed, tags).

    Tags may be ints or short strings; strings are hashed stably so the same
    label always yields the same substream.
    """
    h = mix64(seed ^ _GOLDEN)
    for t in tags:
        if isinstance(t, str):
            t = int.from_bytes(hashlib.blake2b(t.encode(), digest_size=8).digest(), "big")
        h = mix64((h + _GOLDEN) ^ (int(t) & _MASK64))
    return h


def _mix64_np(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_MIX1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


_CHUNK = 1 << 22


def bernoulli_indices(seed: int, count: int, p: float) -> np.ndarray:
    """Indices k in [0, count) whose coin comes up heads with probability p.

    Decision for index k is mix64(seed + (k+1)*GOLDEN) < p * 2^64, i.e. keyed
    per counter value, never per iteration order.
    """
    if count <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(count, dtype=np.int64)
    thr = np.uint64(min(int(p * 2.0**64), _MASK64))
    base = np.uint64(seed & _MASK64)
    golden = np.uint64(_GOLDEN)
    out = []
    for start in range(0, count, _CHUNK):
        stop = min(start + _CHUNK, count)
        ctr = np.arange(start + 1, stop + 1, dtype=np.uint64)
        vals = _mix64_np(base + ctr * golden)
        hits = np.nonzero(vals < thr)[0]
        if hits.size:
            out.append(hits.astype(np.int64) + start)
    if not out:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(out)


class Stream:
    """Sequential draw stream for order-dependent randomness (greedy processes,
    shuffles). Deterministic given the seed."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (2.0**-53)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, seq, k: int) -> list:
        """k distinct elements, order given by a partial Fisher-Yates."""
        items = list(seq)
        if k > len(items):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.randrange(len(items) - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]


def split_probability(p: float, rounds: int) -> float:
    """Per-round probability q with 1-(1-q)^rounds == p: the union of `rounds`
    independent reveals at q is distributed exactly like one reveal at p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability out of [0,1]")
    if rounds <= 1:
        return p
    if p == 1.0:
        return 1.0
    return 1.0 - (1.0 - p) ** (1.0 / rounds)


def split_probability_weighted(p: float, weights) -> list[float]:
    """Split p into len(weights) rounds with exponents proportional to weights;
    the union of the rounds equals one reveal at p exactly."""
    total = float(sum(weights))
    if total <= 0:
        raise ValueError("weights must sum to a positive value")
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability out of [0,1]")
    if p == 1.0:
        return [1.0 for _ in weights]
    return [1.0 - (1.0 - p) ** (w / total) for w in weights]
