"""Seeded random generators for states, subspaces and local maps.

Every helper takes an explicit ``numpy.random.Generator`` so that callers
control reproducibility; sub-seeds are derived with ``SeedSequence`` from
``(seed, index)`` pairs, which keeps results independent of evaluation order.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .linalg import DensityMatrix, DimensionProfile, StateVector, SubspaceBasis, tensor_all

__all__ = [
    "rng_from_seed",
    "derived_rng",
    "haar_vector",
    "haar_state",
    "ginibre_density_on_subspace",
    "random_invertible",
    "random_local_invertible",
    "apply_local_map",
]


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def derived_rng(seed: int, *indices: int) -> np.random.Generator:
    """Generator for sub-task ``indices`` of a top-level seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, indices)]))


def haar_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def haar_state(rng: np.random.Generator, dims: Sequence[int]) -> StateVector:
    profile = DimensionProfile(tuple(dims))
    return StateVector(haar_vector(rng, profile.total_dim), profile)


def ginibre_density_on_subspace(
    rng: np.random.Generator, basis: SubspaceBasis, rank: int | None = None
) -> DensityMatrix:
    """Random full-rank (by default) density matrix supported on the subspace."""
    n = basis.dim
    r = n if rank is None else min(rank, n)
    g = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    w = g @ g.conj().T
    w = w / np.trace(w).real
    b = basis.matrix
    return DensityMatrix(b @ w @ b.conj().T, basis.profile)


def random_invertible(
    rng: np.random.Generator, dim: int, max_cond: float = 30.0
) -> np.ndarray:
    """Random complex invertible matrix with a bounded condition number."""
    while True:
        x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        s = np.linalg.svd(x, compute_uv=False)
        if s[-1] > 0 and s[0] / s[-1] <= max_cond:
            return x / s[0]


def random_local_invertible(
    rng: np.random.Generator, dims: Sequence[int], max_cond: float = 30.0
) -> list[np.ndarray]:
    return [random_invertible(rng, d, max_cond) for d in dims]


def apply_local_map(basis: SubspaceBasis, local_ops: Sequence[np.ndarray]) -> SubspaceBasis:
    """Image of a subspace under a tensor product of local invertible maps."""
    op = local_ops[0]
    for x in local_ops[1:]:
        op = np.kron(op, x)
    mapped = [StateVector(op @ v.amplitudes, basis.profile) for v in basis.vectors]
    return SubspaceBasis(tuple(mapped), basis.profile)


def random_product_state(rng: np.random.Generator, dims: Sequence[int]) -> StateVector:
    factors = [StateVector(haar_vector(rng, d), DimensionProfile((d,))) for d in dims]
    return tensor_all(factors)
