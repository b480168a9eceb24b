"""Seed derivation and generator construction.

Every random draw in the toolkit goes through :func:`make_rng`, which wraps
numpy's PCG64 bit generator. Task seeds are derived from a master seed with
:func:`derive_seed`, a splitmix64-style mixer that is injective in the task
index for a fixed master seed.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    # splitmix64 finalizer; a bijection on 64-bit integers
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, task_index: int) -> int:
    """Derive the 64-bit seed for task ``task_index`` from ``master_seed``.

    ``seed = mix(mix(master) + (task_index + 1) * GOLDEN mod 2**64)``. The
    inner sum is injective in ``task_index`` (GOLDEN is odd) and ``mix`` is a
    bijection, so distinct task indices below 2**64 never collide.
    """
    if task_index < 0:
        raise ValueError("task_index must be non-negative")
    base = _mix64(int(master_seed) & MASK64)
    return _mix64(base + ((task_index + 1) * _GOLDEN & MASK64))


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Return a PCG64 generator for ``seed`` (generators pass through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required")
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
