"""Executable descriptions of the separable states over a subspace.

Each description pins down the set of separable density matrices supported
on a classified subspace through its extreme points: a finite list of
product projectors, a full local Bloch ball, a cone or pair of balls built
from those, or a one-parameter curve of paired product states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateCoefficientsError, SolverInconsistencyError
from .linalg import (
    DimensionProfile,
    StateVector,
    SubspaceBasis,
    assemble_bipartite,
    numeric_rank,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "AllStates",
    "NoSeparable",
    "SinglePoint",
    "Segment",
    "Triangle",
    "LocalBall",
    "Cone",
    "TwoBalls",
    "ProductCurve",
    "FactorPairMap",
    "SeparableSetDescription",
    "build_factor_pair_map",
]


@dataclass(frozen=True)
class AllStates:
    """Every state over the carried subspace is separable."""

    basis: SubspaceBasis
    kind: str = "all_states"


@dataclass(frozen=True)
class NoSeparable:
    """The subspace carries no separable states at all."""

    kind: str = "no_separable"


@dataclass(frozen=True)
class SinglePoint:
    """Exactly one separable state: a single product projector."""

    state: StateVector
    kind: str = "single_point"


@dataclass(frozen=True)
class Segment:
    """Mixtures of two product projectors."""

    states: tuple[StateVector, StateVector]
    kind: str = "segment"


@dataclass(frozen=True)
class Triangle:
    """Mixtures of three product projectors."""

    states: tuple[StateVector, StateVector, StateVector]
    kind: str = "triangle"


@dataclass(frozen=True)
class LocalBall:
    """A Bloch ball: a free two-dimensional factor against a fixed one.

    ``free_cut`` names the subsystems carrying the variation,
    ``local_basis`` spans the two-dimensional local space there, and
    ``fixed_factor`` is the constant state of the remaining subsystems.
    ``ambient`` is the corresponding two-dimensional subspace of the full
    space; every state supported on it is separable.
    """

    free_cut: tuple[int, ...]
    local_basis: tuple[StateVector, StateVector]
    fixed_factor: StateVector
    ambient: SubspaceBasis
    kind: str = "local_ball"

    def ball_state(self, local_coeffs) -> StateVector:
        """Ambient product state for a point of the local qubit space."""
        x = np.asarray(local_coeffs, dtype=complex).reshape(2)
        local = StateVector(
            x[0] * self.local_basis[0].amplitudes + x[1] * self.local_basis[1].amplitudes,
            self.local_basis[0].profile,
        )
        return assemble_bipartite(local, self.fixed_factor, self.ambient.profile, self.free_cut)


@dataclass(frozen=True)
class Cone:
    """Mixtures of one product projector with a full local ball."""

    apex: StateVector
    ball: LocalBall
    kind: str = "cone"


@dataclass(frozen=True)
class TwoBalls:
    """Mixtures of states from two local balls meeting at one product state."""

    ball_a: LocalBall
    ball_b: LocalBall
    intersection: StateVector
    kind: str = "two_balls"


@dataclass(frozen=True)
class FactorPairMap:
    """Invertible map pairing each left-side factor with its right partner.

    The product states of the subspace are exactly the normalized states
    ``psi (x) map(psi)`` as ``psi`` ranges over the two-dimensional left
    local space; :meth:`curve_state` assembles them in ambient coordinates.
    """

    matrix: np.ndarray
    domain_frame: tuple[StateVector, StateVector]
    codomain_frame: tuple[StateVector, StateVector]
    profile: DimensionProfile
    cut: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex).reshape(2, 2)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, domain_coeffs) -> np.ndarray:
        return self.matrix @ np.asarray(domain_coeffs, dtype=complex).reshape(2)

    def domain_state(self, coeffs) -> StateVector:
        x = np.asarray(coeffs, dtype=complex).reshape(2)
        return StateVector(
            x[0] * self.domain_frame[0].amplitudes + x[1] * self.domain_frame[1].amplitudes,
            self.domain_frame[0].profile,
        )

    def codomain_state(self, coeffs) -> StateVector:
        y = np.asarray(coeffs, dtype=complex).reshape(2)
        return StateVector(
            y[0] * self.codomain_frame[0].amplitudes + y[1] * self.codomain_frame[1].amplitudes,
            self.codomain_frame[0].profile,
        )

    def curve_state(self, coeffs) -> StateVector:
        """Normalized paired product state for left coefficients ``coeffs``."""
        x = np.asarray(coeffs, dtype=complex).reshape(2)
        left = self.domain_state(x)
        right = self.codomain_state(self.apply(x))
        return assemble_bipartite(left, right, self.profile, self.cut)


@dataclass(frozen=True)
class ProductCurve:
    """Mixtures of the paired product states of an invertible factor map."""

    pair_map: FactorPairMap
    left_basis: tuple[StateVector, StateVector]
    kind: str = "product_curve"


SeparableSetDescription = Union[
    AllStates,
    NoSeparable,
    SinglePoint,
    Segment,
    Triangle,
    LocalBall,
    Cone,
    TwoBalls,
    ProductCurve,
]


def _frame_coords(frame: Sequence[StateVector], vec: StateVector) -> np.ndarray:
    mat = np.column_stack([f.amplitudes for f in frame])
    return mat.conj().T @ vec.amplitudes


def build_factor_pair_map(
    pairs: Sequence[tuple[StateVector, StateVector]],
    profile: DimensionProfile,
    cut: Sequence[int],
    tol: ToleranceConfig = DEFAULT_TOL,
) -> FactorPairMap:
    """Construct the pairing map from three product factor pairs.

    Both factor triples must be linearly dependent but in general position.
    Writing the third factor in terms of the first two on each side with
    coefficients ``(a, b)`` and ``(c, d)``, the map sends the first left
    factor to the first right factor and the second to ``ad/(bc)`` times the
    second right factor; consistency with the third pair is verified.
    """
    if len(pairs) != 3:
        raise DegenerateCoefficientsError("the pairing map needs exactly three pairs")
    alphas = [a for a, _ in pairs]
    betas = [b for _, b in pairs]
    a_mat = np.column_stack([alphas[0].amplitudes, alphas[1].amplitudes])
    b_mat = np.column_stack([betas[0].amplitudes, betas[1].amplitudes])
    ab, a_res, *_ = np.linalg.lstsq(a_mat, alphas[2].amplitudes, rcond=None)
    cd, b_res, *_ = np.linalg.lstsq(b_mat, betas[2].amplitudes, rcond=None)
    a, b = ab
    c, d = cd
    if min(abs(a), abs(b), abs(c), abs(d)) < np.sqrt(tol.membership_tol):
        raise DegenerateCoefficientsError(
            "dependence coefficients vanish; factors are not in general position"
        )
    for mat, target, coeffs in ((a_mat, alphas[2], ab), (b_mat, betas[2], cd)):
        resid = np.linalg.norm(mat @ coeffs - target.amplitudes)
        if resid > np.sqrt(tol.membership_tol):
            raise DegenerateCoefficientsError(
                f"third factor is not in the span of the first two ({resid:.2e})"
            )

    left_profile = alphas[0].profile
    right_profile = betas[0].profile
    dom_u, _, _ = np.linalg.svd(a_mat, full_matrices=False)
    cod_u, _, _ = np.linalg.svd(b_mat, full_matrices=False)
    domain_frame = (StateVector(dom_u[:, 0], left_profile), StateVector(dom_u[:, 1], left_profile))
    codomain_frame = (StateVector(cod_u[:, 0], right_profile), StateVector(cod_u[:, 1], right_profile))

    a_coords = np.column_stack(
        [_frame_coords(domain_frame, alphas[0]), _frame_coords(domain_frame, alphas[1])]
    )
    ratio = (a * d) / (b * c)
    b_coords = np.column_stack(
        [_frame_coords(codomain_frame, betas[0]), ratio * _frame_coords(codomain_frame, betas[1])]
    )
    matrix = b_coords @ np.linalg.inv(a_coords)
    if numeric_rank(matrix, tol) != 2:
        raise DegenerateCoefficientsError("pairing map is not invertible")

    pm = FactorPairMap(
        matrix=matrix,
        domain_frame=domain_frame,
        codomain_frame=codomain_frame,
        profile=profile,
        cut=tuple(cut),
    )
    for alpha, beta in pairs:
        image = pm.apply(_frame_coords(domain_frame, alpha))
        target = _frame_coords(codomain_frame, beta)
        overlap = abs(np.vdot(image, target)) / (
            np.linalg.norm(image) * np.linalg.norm(target)
        )
        if overlap < 1.0 - 100 * tol.membership_tol:
            raise SolverInconsistencyError(
                f"pairing map fails to reproduce a factor pair (overlap {overlap:.12f})"
            )
    return pm
