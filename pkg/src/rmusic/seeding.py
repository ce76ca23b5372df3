"""Deterministic seed fan-out.

A master seed and a tuple of integer keys are mixed by
``numpy.random.SeedSequence(master, spawn_key=keys)``; the resulting stream
is statistically independent of every other key tuple under the same master.
No stream is ever shared between two consumers, so results do not depend on
the order in which trials or operators are evaluated.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

# Stream tags; the numbers are part of the reproducibility contract.
STREAM_SOURCES = 1
STREAM_NOISE = 2
STREAM_GAUSSIAN = 10
STREAM_COUNT = 11
STREAM_COMPOSITE_GAUSSIAN = 12
STREAM_TRIAL = 20
STREAM_SCENE = 21
STREAM_SKETCH = 22


def _check(seed) -> int:
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    return int(seed)


def rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the sub-stream ``keys`` of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(_check(seed), spawn_key=tuple(int(k) for k in keys)))


def derive_seed(seed: int, *keys: int) -> int:
    """A 63-bit integer seed for the sub-stream ``keys`` of ``seed``."""
    words = np.random.SeedSequence(_check(seed), spawn_key=tuple(int(k) for k in keys)).generate_state(2, np.uint32)
    return int((int(words[0]) << 31) ^ int(words[1])) & ((1 << 63) - 1)
