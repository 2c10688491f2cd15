"""Counter-style random streams keyed by (master seed, trial index).

A trial's randomness depends only on its key, never on which worker ran
it or in which order, so parallel and serial runs agree bit for bit.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the trial identified by ``key``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def child_seed(rng: np.random.Generator) -> int:
    """Derive a 63-bit master seed from a generator (for nested stream families)."""
    return int(rng.integers(0, 2**63 - 1))
