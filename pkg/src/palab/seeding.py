"""Seed handling.

Every random draw in the package comes from a :class:`numpy.random.Generator`
built from a 64-bit seed. Replica seeds are derived from a master seed by a
counter-based split, so replica ``(t, r)`` gets the same seed no matter how
many other replicas an experiment runs.
"""

from __future__ import annotations

import operator

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    try:
        seed = operator.index(seed)
    except TypeError:
        raise ValueError(f"seed must be an integer, got {seed!r}") from None
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive_seed(master: int, *keys: int) -> int:
    """Return the child seed addressed by ``keys`` under ``master``.

    Uses :class:`numpy.random.SeedSequence` with ``keys`` as the spawn key.
    The mapping is a pure function of its arguments.
    """
    ss = np.random.SeedSequence(check_seed(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(check_seed(seed))
