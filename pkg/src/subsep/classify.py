"""Classification of bipartite subspaces of dimension up to three.

A subspace falls into one of 14 classes determined by how many linearly
independent product states it contains and, when that number is three, by
the dimensions of the two local spans and whether the local factor triples
are in general position.  Each class comes with an executable description
of its separable states.

Classification is a discrete verdict on floating-point data, so it is
discontinuous at class boundaries; decisions there resolve toward the more
generic class (the one with the larger separable set) and a boundary
warning is attached to the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np

from .descriptions import (
    AllStates,
    Cone,
    LocalBall,
    NoSeparable,
    ProductCurve,
    Segment,
    SeparableSetDescription,
    SinglePoint,
    Triangle,
    TwoBalls,
    build_factor_pair_map,
)
from .errors import SolverInconsistencyError
from .linalg import StateVector, SubspaceBasis, numeric_rank, rank_one_factors
from .products import ProductStateSet, find_product_states
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "ClassTag",
    "ClassificationResult",
    "general_position",
    "classify_dim2",
    "classify_dim3",
    "classify_bipartite",
    "describe_separable_set",
]


class ClassTag(str, Enum):
    """The 14 separability classes of subspaces with dimension up to 3.

    The five ``BLM_*`` tags cover subspaces whose product states span at
    most two dimensions (they are the complete taxonomy for two-dimensional
    subspaces); the nine ``C_*`` tags cover three-dimensional subspaces
    spanned by product states, labeled by the local span dimensions.
    """

    BLM_NO_PRODUCT = "BLM_NoProduct"
    BLM_ONE_PRODUCT = "BLM_OneProduct"
    BLM_1X2 = "BLM_1x2"
    BLM_2X1 = "BLM_2x1"
    BLM_2X2 = "BLM_2x2"
    C_1X3 = "C_1x3"
    C_3X1 = "C_3x1"
    C_3X3 = "C_3x3"
    C_2X3_I = "C_2x3_i"
    C_2X3_II = "C_2x3_ii"
    C_3X2_I = "C_3x2_i"
    C_3X2_II = "C_3x2_ii"
    C_2X2_I = "C_2x2_i"
    C_2X2_II = "C_2x2_ii"


TRIANGLE_TAGS = (ClassTag.C_3X3, ClassTag.C_2X3_I, ClassTag.C_3X2_I)
CONE_TAGS = (ClassTag.C_2X3_II, ClassTag.C_3X2_II)


@dataclass(frozen=True)
class ClassificationResult:
    """Class tag plus the witnesses and separable-set description behind it."""

    tag: ClassTag
    dim_s: int
    dim_s_sep: int
    dims: tuple[int, int] | None
    witnesses: ProductStateSet
    description: SeparableSetDescription
    cut: tuple[int, ...]
    warnings: tuple[str, ...] = ()


def general_position(vectors: Sequence[StateVector], tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether every d-subset of the vectors is independent, d = their span."""
    stack = np.stack([v.amplitudes for v in vectors])
    d = numeric_rank(stack, tol)
    size = min(d, len(vectors))
    if size == 0:
        return False
    for subset in combinations(range(len(vectors)), size):
        if numeric_rank(stack[list(subset)], tol) < size:
            return False
    return True


def describe_separable_set(result: ClassificationResult) -> SeparableSetDescription:
    """Description of all separable states over the classified subspace."""
    return result.description


def classify_dim2(
    basis: SubspaceBasis,
    cut: Sequence[int] | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> ClassificationResult:
    if basis.dim != 2:
        raise ValueError(f"classify_dim2 expects a 2-dimensional subspace, got {basis.dim}")
    return classify_bipartite(basis, cut, tol, seed)


def classify_dim3(
    basis: SubspaceBasis,
    cut: Sequence[int] | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> ClassificationResult:
    if basis.dim != 3:
        raise ValueError(f"classify_dim3 expects a 3-dimensional subspace, got {basis.dim}")
    return classify_bipartite(basis, cut, tol, seed)


def classify_bipartite(
    basis: SubspaceBasis,
    cut: Sequence[int] | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> ClassificationResult:
    """Classify a subspace of dimension 1 to 3 across a bipartite cut."""
    pset = find_product_states(basis, cut, tol, seed)
    warnings = _boundary_warnings(pset, tol)
    if pset.dim_s_sep <= 2:
        tag, desc, dims = _classify_low_sep(basis, pset, tol)
    else:
        tag, desc, dims = _classify_full_sep(basis, pset, tol)
    return ClassificationResult(
        tag=tag,
        dim_s=basis.dim,
        dim_s_sep=pset.dim_s_sep,
        dims=dims,
        witnesses=pset,
        description=desc,
        cut=pset.cut,
        warnings=tuple(warnings),
    )


def _classify_low_sep(
    basis: SubspaceBasis, pset: ProductStateSet, tol: ToleranceConfig
) -> tuple[ClassTag, SeparableSetDescription, tuple[int, int] | None]:
    """Subspaces whose product states span at most two dimensions."""
    products = pset.spanning_products
    if pset.dim_s_sep == 0:
        return ClassTag.BLM_NO_PRODUCT, NoSeparable(), None
    if pset.dim_s_sep == 1:
        return ClassTag.BLM_ONE_PRODUCT, SinglePoint(products[0]), None
    dims = (pset.a_sep_dim, pset.b_sep_dim)
    if pset.report.kind in ("full_plane", "line"):
        # every state of the product-spanned plane is itself a product state
        sep_basis = SubspaceBasis(tuple(products), basis.profile)
        if dims == (1, 2):
            return ClassTag.BLM_1X2, AllStates(sep_basis), dims
        if dims == (2, 1):
            return ClassTag.BLM_2X1, AllStates(sep_basis), dims
        raise SolverInconsistencyError(
            f"an all-product plane must have local dims (1,2) or (2,1), got {dims}"
        )
    if pset.report.kind == "isolated" and len(products) == 2:
        if dims != (2, 2):
            raise SolverInconsistencyError(
                f"two isolated products must have local dims (2,2), got {dims}"
            )
        return ClassTag.BLM_2X2, Segment((products[0], products[1])), dims
    raise SolverInconsistencyError(
        f"component {pset.report.kind} is impossible with dim S_sep = {pset.dim_s_sep}"
    )


def _classify_full_sep(
    basis: SubspaceBasis, pset: ProductStateSet, tol: ToleranceConfig
) -> tuple[ClassTag, SeparableSetDescription, tuple[int, int]]:
    """Three-dimensional subspaces spanned by product states."""
    dims = (pset.a_sep_dim, pset.b_sep_dim)
    kind = pset.report.kind
    products = pset.spanning_products

    if dims == (1, 3) or dims == (3, 1):
        _require(kind == "full_plane", dims, kind)
        tag = ClassTag.C_1X3 if dims == (1, 3) else ClassTag.C_3X1
        return tag, AllStates(basis), dims
    if dims == (3, 3):
        _require(kind == "isolated", dims, kind)
        return ClassTag.C_3X3, Triangle(tuple(products)), dims
    if dims in ((2, 3), (3, 2)):
        gp = pset.general_position_a if dims == (2, 3) else pset.general_position_b
        if gp:
            _require(kind == "isolated", dims, kind)
            tag = ClassTag.C_2X3_I if dims == (2, 3) else ClassTag.C_3X2_I
            return tag, Triangle(tuple(products)), dims
        _require(kind == "line" and len(pset.report.extra_isolated) == 1, dims, kind)
        tag = ClassTag.C_2X3_II if dims == (2, 3) else ClassTag.C_3X2_II
        return tag, _build_cone(basis, pset, tol), dims
    if dims == (2, 2):
        if pset.general_position_a and pset.general_position_b:
            _require(kind == "conic", dims, kind)
            return ClassTag.C_2X2_II, _build_curve(basis, pset, tol), dims
        _require(kind == "two_lines", dims, kind)
        return ClassTag.C_2X2_I, _build_two_balls(basis, pset, tol), dims
    raise SolverInconsistencyError(
        f"local dims {dims} are impossible for a product-spanned 3-dim subspace"
    )


def _require(condition: bool, dims, kind: str) -> None:
    if not condition:
        raise SolverInconsistencyError(
            f"solution variety {kind!r} is inconsistent with local dims {dims}"
        )


def _ball_from_line_states(
    basis: SubspaceBasis,
    s1: StateVector,
    s2: StateVector,
    cut: tuple[int, ...],
    tol: ToleranceConfig,
) -> LocalBall:
    """Local ball spanned by two product states whose one factor coincides."""
    a1, b1 = rank_one_factors(s1, cut)
    a2, b2 = rank_one_factors(s2, cut)
    complement = basis.profile.complement(cut)
    if a1.projectively_equal(a2, tol):
        free_cut, fixed, locals_ = complement, a1, (b1, b2)
    elif b1.projectively_equal(b2, tol):
        free_cut, fixed, locals_ = cut, b1, (a1, a2)
    else:
        raise SolverInconsistencyError("line states share no common local factor")
    stack = np.column_stack([locals_[0].amplitudes, locals_[1].amplitudes])
    u, _, _ = np.linalg.svd(stack, full_matrices=False)
    profile = locals_[0].profile
    local_basis = (StateVector(u[:, 0], profile), StateVector(u[:, 1], profile))
    ambient = SubspaceBasis((s1, s2), basis.profile)
    return LocalBall(
        free_cut=free_cut, local_basis=local_basis, fixed_factor=fixed, ambient=ambient
    )


def _build_cone(basis: SubspaceBasis, pset: ProductStateSet, tol: ToleranceConfig) -> Cone:
    line = pset.report.line_bases[0]
    s1 = basis.coefficients_to_state(line[0].array)
    s2 = basis.coefficients_to_state(line[1].array)
    apex = basis.coefficients_to_state(pset.report.extra_isolated[0].array)
    ball = _ball_from_line_states(basis, s1, s2, pset.cut, tol)
    return Cone(apex=apex, ball=ball)


def _build_two_balls(basis: SubspaceBasis, pset: ProductStateSet, tol: ToleranceConfig) -> TwoBalls:
    (l1a, l1b), (l2a, l2b) = pset.report.line_bases
    ball_a = _ball_from_line_states(
        basis,
        basis.coefficients_to_state(l1a.array),
        basis.coefficients_to_state(l1b.array),
        pset.cut,
        tol,
    )
    ball_b = _ball_from_line_states(
        basis,
        basis.coefficients_to_state(l2a.array),
        basis.coefficients_to_state(l2b.array),
        pset.cut,
        tol,
    )
    intersection = basis.coefficients_to_state(pset.report.intersection.array)
    return TwoBalls(ball_a=ball_a, ball_b=ball_b, intersection=intersection)


def _build_curve(basis: SubspaceBasis, pset: ProductStateSet, tol: ToleranceConfig) -> ProductCurve:
    pm = build_factor_pair_map(pset.factor_pairs, basis.profile, pset.cut, tol)
    return ProductCurve(pair_map=pm, left_basis=pm.domain_frame)


def _boundary_warnings(pset: ProductStateSet, tol: ToleranceConfig) -> list[str]:
    """Flag rank decisions that sit within a decade of their threshold."""
    warnings = []
    if not pset.spanning_products:
        return warnings
    checks = [("dim_S_sep", np.stack([p.amplitudes for p in pset.spanning_products]))]
    if pset.factor_pairs:
        checks.append(("A_sep", np.stack([a.amplitudes for a, _ in pset.factor_pairs])))
        checks.append(("B_sep", np.stack([b.amplitudes for _, b in pset.factor_pairs])))
    for name, stack in checks:
        if stack.shape[0] < 2:
            continue
        s = np.linalg.svd(stack, compute_uv=False)
        for ratio in (s[1:] / s[0]):
            if ratio > 0 and abs(np.log10(ratio / tol.rank_rel_tol)) < 1.0:
                warnings.append(
                    f"{name} rank decision is within 10x of the tolerance "
                    f"(singular value ratio {ratio:.3e}); classification resolved "
                    "toward the more generic class"
                )
                break
    return warnings
