"""Seeded random objects used by tests, the self-test and demos."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group


def rng_from(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def complex_normal(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(n: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=complex)
    return np.asarray(unitary_group.rvs(n, random_state=rng), dtype=complex)


def random_element(d: int, n: int, rng) -> np.ndarray:
    return complex_normal(rng_from(rng), (d, n))


def random_algebra(d: int, rng) -> np.ndarray:
    return complex_normal(rng_from(rng), (d, d))


def random_unit_vector(m: int, rng) -> np.ndarray:
    v = complex_normal(rng_from(rng), m)
    return v / np.linalg.norm(v)


def random_modular_unit(d: int, n: int, rng) -> np.ndarray:
    """u r^T with u in C^d and r in C^n both unit vectors."""
    rng = rng_from(rng)
    return np.outer(random_unit_vector(d, rng), random_unit_vector(n, rng))


def random_low_rank_element(d: int, n: int, rank: int, rng) -> np.ndarray:
    """Element whose slots span at most ``rank`` dimensions (rows in a rank-limited row space)."""
    rng = rng_from(rng)
    return complex_normal(rng, (d, rank)) @ complex_normal(rng, (rank, n))


__all__ = [
    "rng_from",
    "complex_normal",
    "random_unitary",
    "random_element",
    "random_algebra",
    "random_unit_vector",
    "random_modular_unit",
    "random_low_rank_element",
]
