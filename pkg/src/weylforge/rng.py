"""Deterministic point sampling on a xoshiro256** generator.

The generator follows the public reference algorithm (Blackman/Vigna), seeded
through splitmix64.  Sample points depend only on (seed, stream tag, index),
never on thread scheduling: each manifold gets its own stream and points are
drawn up front in index order.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(state: int):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256StarStar:
    """xoshiro256** 1.0, seeded from a single integer via splitmix64."""

    def __init__(self, seed: int):
        state = seed & _MASK
        s = []
        for _ in range(4):
            state, v = _splitmix64(state)
            s.append(v)
        if not any(s):
            s[0] = 1  # the all-zero state is invalid
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)


def _stream_seed(seed: int, tag: str) -> int:
    h = 0xCBF29CE484222325  # FNV-1a over the tag, folded into the seed
    for byte in tag.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return (seed ^ h) & _MASK


def sample_box(box: np.ndarray, count: int, seed: int, tag: str) -> np.ndarray:
    """`count` points uniform in a (4, 2) lo/hi box, on the (seed, tag) stream."""
    gen = Xoshiro256StarStar(_stream_seed(seed, tag))
    lo = box[:, 0]
    span = box[:, 1] - box[:, 0]
    pts = np.empty((count, box.shape[0]))
    for i in range(count):
        for j in range(box.shape[0]):
            pts[i, j] = lo[j] + gen.uniform() * span[j]
    return pts
