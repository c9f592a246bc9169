"""Full-separability classification for k-partite subspaces, k >= 3.

A three-dimensional subspace spanned by fully-product states falls, after
dropping subsystems with a constant factor, into exactly two geometries:
a triangle of the three spanning projectors, or a spherical cone pairing
one projector with a local Bloch ball.  The decision is driven entirely by
per-subsystem factor patterns: which factor triples are independent, which
are dependent but in general position, and which contain a coinciding pair.
Subspaces whose fully-product states span fewer than three dimensions fall
back to the five low-dimensional classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classify import ClassTag, ClassificationResult, classify_bipartite
from .descriptions import (
    AllStates,
    Cone,
    LocalBall,
    NoSeparable,
    Segment,
    SeparableSetDescription,
    SinglePoint,
    Triangle,
)
from .errors import (
    InconsistentPatternError,
    PreconditionUnmetError,
    UnsupportedRankError,
)
from .linalg import (
    DimensionProfile,
    StateVector,
    SubspaceBasis,
    factorize_product_state,
    numeric_rank,
    schmidt_ratio,
    tensor_all,
)
from .products import ComponentReport, full_product_minor_system, _solve_variety
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "MultipartiteInstance",
    "SubsystemPattern",
    "EqualityPattern",
    "ConeData",
    "MultiClassResult",
    "reduce_trivial_subsystems",
    "equality_pattern",
    "classify_multipartite",
    "classify_multipartite_subspace",
    "find_fully_product_states",
    "paired_factors_independent",
]

TRIANGLE = "Triangle"
SPHERICAL_CONE = "SphericalCone"


@dataclass(frozen=True)
class MultipartiteInstance:
    """Three spanning product states given factor-wise: 3 rows x k columns."""

    factors: tuple[tuple[StateVector, ...], ...]
    subsystem_indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.factors) != 3:
            raise ValueError("an instance holds exactly 3 product states")
        widths = {len(row) for row in self.factors}
        if len(widths) != 1:
            raise ValueError("factor rows must have equal length")
        if len(self.subsystem_indices) != widths.pop():
            raise ValueError("subsystem_indices must match the factor columns")

    @classmethod
    def from_factor_table(cls, rows: Sequence[Sequence[StateVector]]) -> "MultipartiteInstance":
        rows = tuple(tuple(r) for r in rows)
        return cls(rows, tuple(range(len(rows[0]))))

    @classmethod
    def from_ambient_products(
        cls, products: Sequence[StateVector], tol: ToleranceConfig = DEFAULT_TOL
    ) -> "MultipartiteInstance":
        rows = tuple(tuple(factorize_product_state(p, tol)) for p in products)
        return cls(rows, tuple(range(len(rows[0]))))

    @property
    def k(self) -> int:
        return len(self.factors[0])

    @property
    def profile(self) -> DimensionProfile:
        return DimensionProfile(tuple(f.profile.dims[0] for f in self.factors[0]))

    def products(self) -> tuple[StateVector, StateVector, StateVector]:
        return tuple(tensor_all(list(row)) for row in self.factors)

    def product_rank(self, tol: ToleranceConfig = DEFAULT_TOL) -> int:
        return numeric_rank(np.stack([p.amplitudes for p in self.products()]), tol)

    def basis(self) -> SubspaceBasis:
        return SubspaceBasis(self.products(), self.products()[0].profile)

    def complement_factor(self, row: int, exclude: int) -> StateVector:
        """Tensor product of the row's factors over all columns but one."""
        parts = [f for col, f in enumerate(self.factors[row]) if col != exclude]
        if not parts:
            raise ValueError("cannot exclude the only subsystem")
        return tensor_all(parts)


@dataclass(frozen=True)
class SubsystemPattern:
    """Factor-triple shape at one subsystem.

    ``independent``: the three factors span three dimensions.
    ``general_position``: they span two dimensions, pairwise independent.
    ``equal``: two factors coincide projectively (``equal_pair``, 0-based).
    ``trivial``: all three coincide.
    """

    kind: str
    equal_pair: tuple[int, int] | None = None


@dataclass(frozen=True)
class EqualityPattern:
    per_subsystem: tuple[SubsystemPattern, ...]

    def kinds(self) -> tuple[str, ...]:
        return tuple(p.kind for p in self.per_subsystem)


@dataclass(frozen=True)
class ConeData:
    """Witness data for a spherical-cone verdict."""

    apex_index: int
    apex: StateVector
    qubit_subsystem: int
    coinciding_pair: tuple[int, int]
    local_basis: tuple[StateVector, StateVector]


@dataclass(frozen=True)
class MultiClassResult:
    """Verdict for a multipartite subspace."""

    tag: str
    dim_s: int
    dim_s_sep: int
    description: SeparableSetDescription
    products: tuple[StateVector, ...]
    pattern: EqualityPattern | None = None
    cone_data: ConeData | None = None
    free_subsystem: int | None = None
    warnings: tuple[str, ...] = ()


def reduce_trivial_subsystems(
    inst: MultipartiteInstance, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[MultipartiteInstance, tuple[int, ...]]:
    """Drop subsystems whose three factors all coincide.

    A constant factor carries no entanglement and can be absorbed into any
    other subsystem.  Returns the reduced instance and the dropped original
    indices.
    """
    keep, dropped = [], []
    for col in range(inst.k):
        column = [inst.factors[i][col] for i in range(3)]
        if _pattern_for(column, tol).kind == "trivial":
            dropped.append(inst.subsystem_indices[col])
        else:
            keep.append(col)
    if not keep:
        raise InconsistentPatternError(
            "all subsystems are constant, contradicting three independent products"
        )
    rows = tuple(tuple(inst.factors[i][col] for col in keep) for i in range(3))
    indices = tuple(inst.subsystem_indices[col] for col in keep)
    return MultipartiteInstance(rows, indices), tuple(dropped)


def _pattern_for(column: Sequence[StateVector], tol: ToleranceConfig) -> SubsystemPattern:
    stack = np.stack([f.amplitudes for f in column])
    rank = numeric_rank(stack, tol)
    if rank >= 3:
        return SubsystemPattern("independent")
    equal_pairs = [
        (i, j)
        for i in range(3)
        for j in range(i + 1, 3)
        if column[i].projectively_equal(column[j], tol)
    ]
    if rank == 1 or len(equal_pairs) == 3:
        return SubsystemPattern("trivial")
    if equal_pairs:
        return SubsystemPattern("equal", equal_pairs[0])
    return SubsystemPattern("general_position")


def equality_pattern(
    inst: MultipartiteInstance, tol: ToleranceConfig = DEFAULT_TOL
) -> EqualityPattern:
    """Per-subsystem factor patterns of an instance."""
    cols = []
    for col in range(inst.k):
        cols.append(_pattern_for([inst.factors[i][col] for i in range(3)], tol))
    return EqualityPattern(tuple(cols))


def paired_factors_independent(
    alphas: Sequence[StateVector],
    betas: Sequence[StateVector],
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Whether the three paired tensor products are linearly independent.

    Hypotheses: the first factors are linearly independent, or dependent but
    in general position; the second factors are not all projectively equal.
    Under these hypotheses the result is always True.
    """
    a_stack = np.stack([a.amplitudes for a in alphas])
    a_rank = numeric_rank(a_stack, tol)
    pairwise = all(
        numeric_rank(a_stack[[i, j]], tol) == 2 for i in range(3) for j in range(i + 1, 3)
    )
    if a_rank < 3 and not (a_rank == 2 and pairwise):
        raise PreconditionUnmetError(
            "first factors are neither independent nor in general position"
        )
    b_stack = np.stack([b.amplitudes for b in betas])
    if numeric_rank(b_stack, tol) < 2:
        raise PreconditionUnmetError("second factors are all projectively equal")
    paired = np.stack(
        [np.kron(a.amplitudes, b.amplitudes) for a, b in zip(alphas, betas)]
    )
    return numeric_rank(paired, tol) == 3


def classify_multipartite(
    inst: MultipartiteInstance,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
    report: ComponentReport | None = None,
) -> MultiClassResult | ClassificationResult:
    """Triangle-or-cone classification of a product-spanned instance.

    Instances that reduce to two or fewer genuine subsystems delegate to the
    bipartite classifier across a cut separating the first kept subsystem.
    ``report``, when provided by the subspace pipeline, is cross-checked
    against the pattern verdict.
    """
    if inst.product_rank(tol) < 3:
        return classify_multipartite_subspace(
            SubspaceBasis(inst.products(), inst.products()[0].profile), tol, seed
        )
    reduced, _dropped = reduce_trivial_subsystems(inst, tol)
    if reduced.k <= 2 or inst.profile.n_subsystems == 2:
        cut = (reduced.subsystem_indices[0],)
        return classify_bipartite(inst.basis(), cut, tol, seed)

    pattern = equality_pattern(reduced, tol)
    kinds = pattern.kinds()
    if "trivial" in kinds:
        raise InconsistentPatternError("trivial subsystem survived reduction")

    independents = [j for j, k in enumerate(kinds) if k == "independent"]
    gps = [j for j, k in enumerate(kinds) if k == "general_position"]
    equal_cols = {j: pattern.per_subsystem[j].equal_pair for j, k in enumerate(kinds) if k == "equal"}

    verdict: tuple[str, int | None, tuple[int, int] | None]
    if len(independents) + len(gps) >= 2:
        verdict = (TRIANGLE, None, None)
    elif len(independents) + len(gps) == 1:
        pivot = (independents + gps)[0]
        pairs = set(equal_cols.values())
        if len(pairs) == 1:
            verdict = (SPHERICAL_CONE, pivot, pairs.pop())
        else:
            verdict = (TRIANGLE, None, None)
    else:
        pairs = set(equal_cols.values())
        if len(pairs) == 1:
            raise InconsistentPatternError(
                "every subsystem shares the same coinciding pair, so the products "
                "cannot span three dimensions"
            )
        verdict = _all_equal_verdict(equal_cols, reduced.k)

    tag, pivot, pair = verdict
    products = inst.products()
    if tag == TRIANGLE:
        if report is not None and report.kind != "isolated":
            raise InconsistentPatternError(
                f"pattern says Triangle but the solution variety is {report.kind}"
            )
        desc = Triangle(products)
        return MultiClassResult(
            tag=TRIANGLE,
            dim_s=3,
            dim_s_sep=3,
            description=desc,
            products=products,
            pattern=pattern,
        )
    if report is not None and report.kind != "line":
        raise InconsistentPatternError(
            f"pattern says SphericalCone but the solution variety is {report.kind}"
        )
    cone = _build_spherical_cone(inst, reduced, pivot, pair, tol)
    return MultiClassResult(
        tag=SPHERICAL_CONE,
        dim_s=3,
        dim_s_sep=3,
        description=cone[0],
        products=products,
        pattern=pattern,
        cone_data=cone[1],
    )


def _all_equal_verdict(
    equal_cols: dict[int, tuple[int, int]], k: int
) -> tuple[str, int | None, tuple[int, int] | None]:
    """Verdict when every subsystem has a coinciding pair.

    A spherical cone needs all subsystems except one to share the same
    coinciding pair; any other arrangement of at least two distinct pairs
    yields a triangle.
    """
    for pivot in range(k):
        others = {p for j, p in equal_cols.items() if j != pivot}
        if len(others) == 1:
            common = others.pop()
            if equal_cols[pivot] != common:
                return (SPHERICAL_CONE, pivot, common)
    return (TRIANGLE, None, None)


def _build_spherical_cone(
    inst: MultipartiteInstance,
    reduced: MultipartiteInstance,
    pivot_col: int,
    pair: tuple[int, int],
    tol: ToleranceConfig,
) -> tuple[Cone, ConeData]:
    i, j = pair
    apex_index = ({0, 1, 2} - {i, j}).pop()
    products = inst.products()
    apex = products[apex_index]
    original_subsystem = reduced.subsystem_indices[pivot_col]
    pivot_in_full = inst.subsystem_indices.index(original_subsystem)

    local_i = inst.factors[i][pivot_in_full]
    local_j = inst.factors[j][pivot_in_full]
    stack = np.column_stack([local_i.amplitudes, local_j.amplitudes])
    u, _, _ = np.linalg.svd(stack, full_matrices=False)
    local_profile = local_i.profile
    local_basis = (StateVector(u[:, 0], local_profile), StateVector(u[:, 1], local_profile))

    fixed = inst.complement_factor(i, pivot_in_full)
    ambient = SubspaceBasis((products[i], products[j]), products[i].profile)
    ball = LocalBall(
        free_cut=(original_subsystem,),
        local_basis=local_basis,
        fixed_factor=fixed,
        ambient=ambient,
    )
    cone = Cone(apex=apex, ball=ball)
    data = ConeData(
        apex_index=apex_index,
        apex=apex,
        qubit_subsystem=original_subsystem,
        coinciding_pair=pair,
        local_basis=local_basis,
    )
    return cone, data


def find_fully_product_states(
    basis: SubspaceBasis,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> tuple[ComponentReport, tuple[StateVector, ...], int]:
    """Fully-product states of a multipartite subspace.

    Returns the solution-variety report over the combined single-subsystem
    minor system, up to three spanning fully-product states, and the
    dimension they span.
    """
    if basis.dim > 3:
        raise UnsupportedRankError("only subspaces of dimension up to 3 are handled")
    if basis.dim == 1:
        v = basis.vectors[0]
        ratios = [
            schmidt_ratio(v, (j,))
            for j in range(basis.profile.n_subsystems)
            if basis.profile.dims[j] > 1
        ]
        from .products import ProjectivePoint

        if max(ratios, default=0.0) <= np.sqrt(tol.membership_tol):
            report = ComponentReport(kind="isolated", points=(ProjectivePoint((1.0,)),))
            return report, (v,), 1
        return ComponentReport(kind="empty"), (), 0

    qs = full_product_minor_system(basis)
    report = _solve_variety(qs, tol, seed, n_pairs=4, n_lines=16)
    from .products import _spanning_coefficients

    coeffs = _spanning_coefficients(report, basis.dim)
    products = []
    for c in coeffs:
        state = basis.coefficients_to_state(c)
        for j in range(basis.profile.n_subsystems):
            if basis.profile.dims[j] > 1 and schmidt_ratio(state, (j,)) > tol.membership_tol:
                raise InconsistentPatternError(
                    "reported fully-product state fails a single-subsystem Schmidt test"
                )
        products.append(state)
    dim_s_sep = (
        numeric_rank(np.stack([p.amplitudes for p in products]), tol) if products else 0
    )
    return report, tuple(products), dim_s_sep


def classify_multipartite_subspace(
    basis: SubspaceBasis,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> MultiClassResult | ClassificationResult:
    """Classify a k-partite subspace (k >= 3) by its fully-product states."""
    if basis.profile.n_subsystems == 2:
        return classify_bipartite(basis, None, tol, seed)
    report, products, dim_s_sep = find_fully_product_states(basis, tol, seed)
    if dim_s_sep <= 2:
        return _classify_low_sep_multi(basis, report, products, dim_s_sep, tol)
    inst = MultipartiteInstance.from_ambient_products(products, tol)
    return classify_multipartite(inst, tol, seed, report=report)


def _classify_low_sep_multi(
    basis: SubspaceBasis,
    report: ComponentReport,
    products: tuple[StateVector, ...],
    dim_s_sep: int,
    tol: ToleranceConfig,
) -> MultiClassResult:
    """Low-dimensional fully-product structure: the five legacy classes."""
    if dim_s_sep == 0:
        return MultiClassResult(
            tag=ClassTag.BLM_NO_PRODUCT.value,
            dim_s=basis.dim,
            dim_s_sep=0,
            description=NoSeparable(),
            products=(),
        )
    if dim_s_sep == 1:
        return MultiClassResult(
            tag=ClassTag.BLM_ONE_PRODUCT.value,
            dim_s=basis.dim,
            dim_s_sep=1,
            description=SinglePoint(products[0]),
            products=products,
        )
    if report.kind in ("line", "full_plane"):
        free = _free_subsystem(products, tol)
        sep_basis = SubspaceBasis(tuple(products), basis.profile)
        return MultiClassResult(
            tag=ClassTag.BLM_1X2.value,
            dim_s=basis.dim,
            dim_s_sep=2,
            description=AllStates(sep_basis),
            products=products,
            free_subsystem=free,
        )
    return MultiClassResult(
        tag=ClassTag.BLM_2X2.value,
        dim_s=basis.dim,
        dim_s_sep=2,
        description=Segment((products[0], products[1])),
        products=products,
    )


def _free_subsystem(products: Sequence[StateVector], tol: ToleranceConfig) -> int:
    """The unique subsystem where two fully-product states differ."""
    rows = [factorize_product_state(p, tol) for p in products[:2]]
    differing = [
        j
        for j in range(len(rows[0]))
        if not rows[0][j].projectively_equal(rows[1][j], tol)
    ]
    if len(differing) != 1:
        raise InconsistentPatternError(
            f"an all-product plane must vary in exactly one subsystem, got {differing}"
        )
    return differing[0]
