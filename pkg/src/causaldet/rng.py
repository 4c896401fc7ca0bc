"""Reproducible random streams on a counter-based bit generator.

All randomness in the package flows through these two constructors so that a
(seed, path) pair addresses the same stream on every platform.  Parallel
workers take disjoint sub-streams by construction, so merged results do not
depend on execution order.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Master stream for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed) & _MASK64)))


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent sub-stream addressed by (seed, *path).

    Distinct paths give statistically independent, non-overlapping streams.
    """
    key = tuple(int(p) & 0xFFFFFFFF for p in path)
    seq = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))
