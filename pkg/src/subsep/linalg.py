"""Dense complex linear algebra shared by every other module.

Conventions: subsystem ordering is row-major (first subsystem most
significant) in flattened indices, matching ``numpy.kron``.  All values are
immutable; construction normalizes instead of rejecting slightly-off input.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionUnmetError, UnsupportedRankError
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "DimensionProfile",
    "StateVector",
    "DensityMatrix",
    "SubspaceBasis",
    "tensor",
    "schmidt_decompose",
    "partial_transpose",
    "partial_transpose_cut",
    "partial_trace",
    "numeric_rank",
    "support_basis",
]


def _frozen_complex(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DimensionProfile:
    """Ordered local Hilbert-space dimensions ``d_1 .. d_k``."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError(f"invalid dimension profile {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def subsystem_dim(self, indices: Iterable[int]) -> int:
        return prod(self.dims[j] for j in indices)

    def complement(self, indices: Iterable[int]) -> tuple[int, ...]:
        left = set(indices)
        return tuple(j for j in range(len(self.dims)) if j not in left)

    def validate_cut(self, cut: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Split subsystems into (cut, complement), rejecting degenerate cuts."""
        left = tuple(sorted(set(int(j) for j in cut)))
        if any(j < 0 or j >= len(self.dims) for j in left):
            raise ValueError(f"cut {cut} out of range for {self.dims}")
        right = self.complement(left)
        if not left or not right:
            raise ValueError("cut must leave subsystems on both sides")
        return left, right

    def concat(self, other: "DimensionProfile") -> "DimensionProfile":
        return DimensionProfile(self.dims + other.dims)


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitude vector over a dimension profile.

    Two state vectors are physically the same when they differ only by a
    global phase; use :meth:`projectively_equal` for that comparison.
    """

    amplitudes: np.ndarray
    profile: DimensionProfile

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape[0] != self.profile.total_dim:
            raise ValueError(
                f"length {amp.shape[0]} does not match profile {self.profile.dims}"
            )
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        object.__setattr__(self, "amplitudes", _frozen_complex(amp / norm))

    @classmethod
    def from_array(cls, values, dims: Sequence[int]) -> "StateVector":
        return cls(np.asarray(values, dtype=complex), DimensionProfile(tuple(dims)))

    @classmethod
    def basis_state(cls, index: int, dims: Sequence[int]) -> "StateVector":
        profile = DimensionProfile(tuple(dims))
        amp = np.zeros(profile.total_dim, dtype=complex)
        amp[index] = 1.0
        return cls(amp, profile)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projectively_equal(self, other: "StateVector", tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return abs(self.overlap(other)) >= 1.0 - tol.membership_tol

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.profile)

    def as_matrix(self, cut: Sequence[int]) -> np.ndarray:
        """Reshape into a ``d_cut x d_rest`` matrix across the given cut."""
        left, right = self.profile.validate_cut(cut)
        tensor_form = self.amplitudes.reshape(self.profile.dims)
        tensor_form = np.transpose(tensor_form, left + right)
        return tensor_form.reshape(
            self.profile.subsystem_dim(left), self.profile.subsystem_dim(right)
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one, positive semidefinite operator."""

    entries: np.ndarray
    profile: DimensionProfile
    validate_psd: bool = field(default=True, compare=False)

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        d = self.profile.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"shape {mat.shape} does not match profile {self.profile.dims}")
        scale = float(np.abs(mat).max()) or 1.0
        herm_defect = float(np.abs(mat - mat.conj().T).max())
        if herm_defect > 1e-6 * scale:
            raise ValueError(f"matrix is not Hermitian (defect {herm_defect:.2e})")
        mat = 0.5 * (mat + mat.conj().T)
        tr = float(mat.trace().real)
        if tr <= 0:
            raise ValueError("trace must be positive")
        mat = mat / tr
        if self.validate_psd:
            lo = float(np.linalg.eigvalsh(mat)[0])
            if lo < -1e-7:
                raise ValueError(f"matrix is not positive semidefinite (min eig {lo:.2e})")
        object.__setattr__(self, "entries", _frozen_complex(mat))

    @classmethod
    def from_array(cls, values, dims: Sequence[int]) -> "DensityMatrix":
        return cls(np.asarray(values, dtype=complex), DimensionProfile(tuple(dims)))

    @classmethod
    def mixture(cls, weights, states: Sequence["DensityMatrix"]) -> "DensityMatrix":
        weights = np.asarray(weights, dtype=float)
        acc = sum(w * s.entries for w, s in zip(weights, states))
        return cls(acc, states[0].profile)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal spanning set of a Hilbert subspace with dim <= 3."""

    vectors: tuple[StateVector, ...]
    profile: DimensionProfile

    def __post_init__(self):
        if not 1 <= len(self.vectors) <= 3:
            raise ValueError("a subspace basis holds 1 to 3 vectors")
        stack = np.column_stack([v.amplitudes for v in self.vectors])
        u, s, _ = np.linalg.svd(stack, full_matrices=False)
        rank = int(np.sum(s >= DEFAULT_TOL.rank_rel_tol * s[0]))
        ortho = tuple(StateVector(u[:, i], self.profile) for i in range(rank))
        object.__setattr__(self, "vectors", ortho)

    @classmethod
    def from_vectors(cls, vectors, dims: Sequence[int]) -> "SubspaceBasis":
        profile = DimensionProfile(tuple(dims))
        states = tuple(
            v if isinstance(v, StateVector) else StateVector(np.asarray(v, dtype=complex), profile)
            for v in vectors
        )
        return cls(states, profile)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        """Ambient-dimension x dim matrix with orthonormal columns."""
        return np.column_stack([v.amplitudes for v in self.vectors])

    def project_residual(self, amplitudes: np.ndarray) -> float:
        """Norm of the component of a unit vector outside the subspace."""
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        amp = amp / np.linalg.norm(amp)
        coeffs = self.matrix.conj().T @ amp
        return float(np.linalg.norm(amp - self.matrix @ coeffs))

    def coefficients_to_state(self, coeffs) -> StateVector:
        return StateVector(self.matrix @ np.asarray(coeffs, dtype=complex), self.profile)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product of two states; profiles concatenate."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes), a.profile.concat(b.profile))


def tensor_all(states: Sequence[StateVector]) -> StateVector:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def schmidt_decompose(
    v: StateVector, cut: Sequence[int]
) -> list[tuple[float, StateVector, StateVector]]:
    """Schmidt decomposition of a pure state across a bipartite cut.

    Returns ``(singular value, left state, right state)`` triples sorted by
    descending singular value; the squares of the singular values sum to 1.
    """
    left, right = v.profile.validate_cut(cut)
    mat = v.as_matrix(left)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    left_profile = DimensionProfile(tuple(v.profile.dims[j] for j in left))
    right_profile = DimensionProfile(tuple(v.profile.dims[j] for j in right))
    return [
        (float(s[i]), StateVector(u[:, i], left_profile), StateVector(vh[i, :].conj(), right_profile))
        for i in range(len(s))
        if s[i] > 0
    ]


def schmidt_ratio(v: StateVector, cut: Sequence[int]) -> float:
    """sigma_2 / sigma_1 across the cut; 0 means an exact product state."""
    s = np.linalg.svd(v.as_matrix(cut), compute_uv=False)
    if len(s) < 2 or s[0] == 0:
        return 0.0
    return float(s[1] / s[0])


def partial_transpose_cut(entries: np.ndarray, dims: Sequence[int], cut: Sequence[int]) -> np.ndarray:
    """Transpose the complement of ``cut`` in a matrix over ``dims``."""
    profile = DimensionProfile(tuple(dims))
    left, right = profile.validate_cut(cut)
    k = len(profile.dims)
    d_left = profile.subsystem_dim(left)
    d_right = profile.subsystem_dim(right)
    t = np.asarray(entries, dtype=complex).reshape(profile.dims + profile.dims)
    order = list(left + right) + [k + j for j in left + right]
    t = np.transpose(t, order).reshape(d_left, d_right, d_left, d_right)
    t = np.transpose(t, (0, 3, 2, 1))
    return t.reshape(d_left * d_right, d_left * d_right)


def partial_transpose(rho: DensityMatrix, side: int = 1) -> np.ndarray:
    """Partial transpose of a bipartite state on the given subsystem.

    The output is Hermitian but in general not positive semidefinite, so it
    is returned as a plain array.
    """
    if rho.profile.n_subsystems != 2:
        raise ValueError("partial_transpose expects a bipartite profile")
    if side not in (0, 1):
        raise ValueError("side must be 0 or 1")
    cut = (1,) if side == 0 else (0,)
    return partial_transpose_cut(rho.entries, rho.profile.dims, cut)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the ``keep`` subsystems."""
    dims = rho.profile.dims
    k = len(dims)
    keep_t = tuple(sorted(set(int(j) for j in keep)))
    if not keep_t or len(keep_t) >= k:
        raise ValueError("keep must be a nonempty strict subset of subsystems")
    if any(j < 0 or j >= k for j in keep_t):
        raise ValueError(f"keep {keep} out of range")
    letters = string.ascii_lowercase
    row = list(letters[:k])
    col = [letters[j] if j not in keep_t else letters[k + j] for j in range(k)]
    out = "".join(row[j] for j in keep_t) + "".join(col[j] for j in keep_t)
    t = rho.entries.reshape(dims + dims)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d_keep = prod(dims[j] for j in keep_t)
    reduced = reduced.reshape(d_keep, d_keep)
    return DensityMatrix(reduced, DimensionProfile(tuple(dims[j] for j in keep_t)))


def numeric_rank(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Count of singular values >= rank_rel_tol * sigma_max; 0 for the zero matrix."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s >= tol.rank_rel_tol * s[0]))


def support_basis(rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal eigenbasis of the support of a rank-<=3 state."""
    vals, vecs = np.linalg.eigh(rho.entries)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    top = max(float(vals[0]), 0.0)
    if top == 0.0:
        raise ValueError("zero state has no support")
    count = int(np.sum(vals > tol.rank_rel_tol * top))
    if count > 3:
        raise UnsupportedRankError(f"support has rank {count} > 3")
    states = tuple(StateVector(vecs[:, i], rho.profile) for i in range(count))
    return SubspaceBasis(states, rho.profile)


def assemble_bipartite(
    left_vec: StateVector, right_vec: StateVector, profile: DimensionProfile, cut: Sequence[int]
) -> StateVector:
    """Tensor a cut-side vector with a complement-side vector in natural order."""
    left, right = profile.validate_cut(cut)
    dims_left = tuple(profile.dims[j] for j in left)
    dims_right = tuple(profile.dims[j] for j in right)
    tensor_form = np.outer(left_vec.amplitudes, right_vec.amplitudes).reshape(
        dims_left + dims_right
    )
    order = left + right
    inverse = np.argsort(order)
    return StateVector(np.transpose(tensor_form, inverse).reshape(-1), profile)


def rank_one_factors(v: StateVector, cut: Sequence[int]) -> tuple[StateVector, StateVector]:
    """Dominant Schmidt pair of a (near-)product state across the cut."""
    terms = schmidt_decompose(v, cut)
    if not terms:
        raise PreconditionUnmetError("state has no Schmidt terms")
    return terms[0][1], terms[0][2]


def factorize_product_state(
    v: StateVector, tol: ToleranceConfig = DEFAULT_TOL
) -> list[StateVector]:
    """Split a fully-product state into one local factor per subsystem.

    Uses sequential Schmidt splits; raises if any split has a second
    singular value above tolerance (the state is then not a product).
    """
    k = v.profile.n_subsystems
    if k == 1:
        return [v]
    factors: list[StateVector] = []
    rest = v
    for _ in range(k - 1):
        ratio = schmidt_ratio(rest, (0,))
        if ratio > np.sqrt(tol.membership_tol):
            raise PreconditionUnmetError(
                f"vector is not a product state (sigma2/sigma1 = {ratio:.2e})"
            )
        left, right = rank_one_factors(rest, (0,))
        factors.append(left)
        rest = right
    factors.append(rest)
    return factors
