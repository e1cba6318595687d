"""Random-number streams: one seedable, splittable family for the whole package.

Everything draws from numpy PCG64 generators. Ensembles split a base seed
into per-run streams with SeedSequence spawn keys, so run r is reproducible
in isolation and independent of execution order.
"""

from __future__ import annotations

import numpy as np


def stream(seed) -> np.random.Generator:
    """Root stream for a scalar seed (or pass through an existing Generator)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed))


def run_stream(base_seed: int, run_index: int) -> np.random.Generator:
    """Independent stream for run run_index of an ensemble keyed by base_seed."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=base_seed, spawn_key=(run_index,)))


def substream(base_seed: int, *key: int) -> np.random.Generator:
    """Stream for a named role (nested spawn key) under one base seed."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(key)))
