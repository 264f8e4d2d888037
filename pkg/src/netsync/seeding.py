"""Deterministic seed derivation for nested Monte Carlo loops.

Every stochastic routine in the package takes an explicit seed and derives
per-task generators through ``numpy.random.SeedSequence`` spawn keys, so a
(master seed, index tuple) pair always maps to the same stream regardless of
execution order or parallelism.
"""
from __future__ import annotations

import numpy as np

__all__ = ["derived_rng", "derived_seed_sequence"]


def derived_seed_sequence(master_seed: int, *key: int) -> np.random.SeedSequence:
    """Seed sequence for the task identified by ``key`` under ``master_seed``."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key))


def derived_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Generator for the task identified by ``key`` under ``master_seed``.

    Distinct key tuples yield statistically independent streams; the same
    tuple always yields the same stream.
    """
    return np.random.default_rng(derived_seed_sequence(master_seed, *key))
