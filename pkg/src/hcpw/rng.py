"""Deterministic randomness helpers.

Every randomized operation in the package takes either a 64-bit seed or an
explicit ``numpy.random.Generator``.  Generators are never shared between
independent work units; callers split a master seed instead.
"""

from __future__ import annotations

import numpy as np

RngLike = "int | np.random.Generator"


def make_rng(seed_or_rng: int | np.random.Generator) -> np.random.Generator:
    """Return a PCG64-backed generator; passes existing generators through."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.Generator(np.random.PCG64(int(seed_or_rng)))


def split(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Split ``count`` independent child generators off ``rng``."""
    return list(rng.spawn(count))


def child_seeds(master_seed: int, count: int) -> list[int]:
    """Derive ``count`` independent 63-bit seeds from one master seed."""
    ss = np.random.SeedSequence(int(master_seed))
    return [int(s.generate_state(1, np.uint64)[0] >> 1) for s in ss.spawn(count)]
