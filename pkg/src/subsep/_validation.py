"""Input validation helpers shared by the estimator, CLI and file parsers."""

from __future__ import annotations

from math import prod
from typing import Sequence

import numpy as np

from .linalg import DensityMatrix, DimensionProfile, StateVector, SubspaceBasis
from .tolerances import DEFAULT_TOL, ToleranceConfig


def check_dims(dims) -> tuple[int, ...]:
    if dims is None:
        raise ValueError("dims is required (local Hilbert-space dimensions)")
    dims = tuple(int(d) for d in np.asarray(dims).reshape(-1))
    if len(dims) < 2:
        raise ValueError("dims must list at least two subsystems")
    if any(d < 1 for d in dims):
        raise ValueError(f"dims must be positive, got {dims}")
    return dims


def check_vector_array(x, dims: tuple[int, ...]) -> np.ndarray:
    """Coerce to a (n_vectors, total_dim) complex array with 1 <= n <= 3."""
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array of row vectors, got shape {arr.shape}")
    total = prod(dims)
    if arr.shape[1] != total:
        raise ValueError(
            f"vector length {arr.shape[1]} does not match prod(dims) = {total}"
        )
    if not 1 <= arr.shape[0] <= 3:
        raise ValueError(f"need 1 to 3 spanning vectors, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vectors contain non-finite entries")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms < 1e-12):
        raise ValueError("vectors must be nonzero")
    return arr


def check_density_array(x, dims: tuple[int, ...]) -> np.ndarray:
    """Coerce to a (n_states, D, D) complex array of density matrices."""
    arr = np.asarray(x, dtype=complex)
    total = prod(dims)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3 or arr.shape[1] != total or arr.shape[2] != total:
        raise ValueError(
            f"expected density matrices of shape ({total}, {total}), got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrices contain non-finite entries")
    return arr


def subspace_from_array(x, dims) -> SubspaceBasis:
    dims = check_dims(dims)
    arr = check_vector_array(x, dims)
    return SubspaceBasis.from_vectors(list(arr), dims)


def pairs_to_complex(data) -> np.ndarray:
    """Decode nested ``[re, im]`` pairs into a complex array."""
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex values must be encoded as [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def complex_to_pairs(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def tolerances_from_payload(data: dict | None) -> ToleranceConfig:
    if not data:
        return DEFAULT_TOL
    allowed = {"rank_rel_tol", "membership_tol", "root_cluster_tol", "psd_tol"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown tolerance fields {sorted(unknown)}")
    return DEFAULT_TOL.replace(**{k: float(v) for k, v in data.items()})


def parse_subspace_payload(data: dict) -> tuple[SubspaceBasis, ToleranceConfig, int, list]:
    """Parse a subspace JSON payload: dims, vectors, optional tol/seed/factors.

    Returns the orthonormalized basis, tolerances, seed and the raw factor
    table (empty when absent).
    """
    if "dims" not in data:
        raise ValueError("payload is missing 'dims'")
    dims = check_dims(data["dims"])
    if "vectors" in data:
        vectors = [pairs_to_complex(v) for v in data["vectors"]]
    elif "factors" in data:
        vectors = []
        for row in data["factors"]:
            acc = np.array([1.0 + 0j])
            for factor in row:
                acc = np.kron(acc, pairs_to_complex(factor))
            vectors.append(acc)
    else:
        raise ValueError("payload needs 'vectors' or 'factors'")
    arr = check_vector_array(np.stack(vectors), dims)
    basis = SubspaceBasis.from_vectors(list(arr), dims)
    tol = tolerances_from_payload(data.get("tol"))
    seed = int(data.get("seed", 0))
    factors = data.get("factors", [])
    return basis, tol, seed, factors


def parse_state_payload(data: dict) -> tuple[DensityMatrix, ToleranceConfig, int]:
    """Parse a density-matrix JSON payload: dims and row-major matrix."""
    if "dims" not in data or "matrix" not in data:
        raise ValueError("payload needs 'dims' and 'matrix'")
    dims = check_dims(data["dims"])
    mat = pairs_to_complex(data["matrix"])
    total = prod(dims)
    mat = np.asarray(mat, dtype=complex).reshape(total, total)
    rho = DensityMatrix(mat, DimensionProfile(dims))
    tol = tolerances_from_payload(data.get("tol"))
    seed = int(data.get("seed", 0))
    return rho, tol, seed
