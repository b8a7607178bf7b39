"""Stateless counter-based randomness for lattice site fields.

Every random decision in the package derives from ``site_hash(seed, coords)``,
a splitmix-style mix of a 64-bit seed and integer coordinates.  The same chain
is implemented three times (scalar Python here, vectorized numpy here, and a
numba mirror in ``_kernels``); the test suite asserts bit-equality of all
three so that slow reference code and fast kernels see identical fields.
"""
from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB
COORD_SALT = 0xD6E8FEB86659FD93
INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def site_hash(seed: int, coords) -> int:
    """64-bit hash of (seed, integer coordinate tuple)."""
    h = mix64((seed + GAMMA) & MASK64)
    for c in coords:
        h = mix64((h + (c & MASK64) * COORD_SALT + GAMMA) & MASK64)
    return h


def site_uniform(seed: int, coords) -> float:
    """Uniform value in [0, 1) that is a pure function of (seed, coords)."""
    return (site_hash(seed, coords) >> 11) * INV_2_53


def derive_seed(base_seed: int, index: int) -> int:
    """Per-replica seed; distinct indices give independent streams."""
    return site_hash(base_seed, (index,))


def uniform_array(seed: int, coords: np.ndarray) -> np.ndarray:
    """Vectorized ``site_uniform`` over an (n, k) int64 coordinate array."""
    coords = np.asarray(coords, dtype=np.int64)
    if coords.ndim == 1:
        coords = coords[:, None]
    n = coords.shape[0]
    with np.errstate(over="ignore"):
        h = np.full(n, np.uint64(mix64((seed + GAMMA) & MASK64)), dtype=np.uint64)
        salt = np.uint64(COORD_SALT)
        gamma = np.uint64(GAMMA)
        for j in range(coords.shape[1]):
            h = h + coords[:, j].astype(np.uint64) * salt + gamma
            h = (h ^ (h >> np.uint64(30))) * np.uint64(MIX_A)
            h = (h ^ (h >> np.uint64(27))) * np.uint64(MIX_B)
            h = h ^ (h >> np.uint64(31))
        return (h >> np.uint64(11)).astype(np.float64) * INV_2_53
