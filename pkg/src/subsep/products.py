"""Product states inside a subspace via the 2x2-minor quadric system.

Reshaping each basis vector of a subspace across a bipartite cut gives a
pencil of matrices ``M(c) = sum_i c_i M_i``; the coefficient vectors of
product states are exactly the projective common zeros of all 2x2 minors,
which are holomorphic quadratic forms in ``c``.  The solution variety of
such a system is one of: at most three isolated points, a projective line
(possibly with one extra isolated point), two lines, a smooth conic, or the
full coefficient space.  The solver below detects isolated points with a
resultant / companion-matrix elimination over random quadric pairs and
positive-dimensional components with random projective line probes, and
verifies every reported solution against the full system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import (
    InconsistentProbesError,
    NotIsolatedError,
    PreconditionUnmetError,
    UnsupportedRankError,
)
from .linalg import (
    DimensionProfile,
    StateVector,
    SubspaceBasis,
    numeric_rank,
    rank_one_factors,
    schmidt_ratio,
)
from .sampling import derived_rng, haar_vector
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "ProjectivePoint",
    "QuadricSystem",
    "ComponentReport",
    "ProductStateSet",
    "chordal_distance",
    "minor_system",
    "full_product_minor_system",
    "solve_isolated",
    "detect_positive_dimensional",
    "find_product_states",
]

# Quadrics built from orthonormal bases have O(1) norm, so candidate roots
# are admitted loosely, polished, then gated at membership_tol.
_PREFILTER_FACTOR = 1e4
_RESULTANT_TOL = 1e-10


def chordal_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Fubini-Study chordal distance between projective points."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("projective points cannot be zero")
    cos2 = min(1.0, abs(np.vdot(a, b)) ** 2 / (na * nb) ** 2)
    return float(np.sqrt(max(0.0, 1.0 - cos2)))


def _canonical_coeffs(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).reshape(-1)
    c = c / np.linalg.norm(c)
    idx = int(np.argmax(np.abs(c) >= 1e-6))
    phase = c[idx] / abs(c[idx])
    c = c / phase
    return c


@dataclass(frozen=True)
class ProjectivePoint:
    """Point of projective coefficient space, canonically normalized.

    Unit norm with the first significant entry made real positive, so equal
    points compare equal; use :func:`chordal_distance` for tolerant matching.
    """

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        c = _canonical_coeffs(np.array(self.coeffs))
        object.__setattr__(self, "coeffs", tuple(complex(x) for x in c))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def distance(self, other: "ProjectivePoint") -> float:
        return chordal_distance(self.array, other.array)


@dataclass(frozen=True)
class QuadricSystem:
    """Holomorphic quadratic forms whose common zeros are product states."""

    quadrics: tuple[np.ndarray, ...]
    n_vars: int
    source: SubspaceBasis
    cuts: tuple[tuple[int, ...], ...]

    def scales(self) -> np.ndarray:
        return np.array([max(1.0, float(np.linalg.norm(q))) for q in self.quadrics])

    def max_norm(self) -> float:
        return max(float(np.linalg.norm(q)) for q in self.quadrics)

    def evaluate(self, coeffs: np.ndarray) -> np.ndarray:
        c = np.asarray(coeffs, dtype=complex).reshape(-1)
        return np.array([c @ q @ c for q in self.quadrics])

    def residual(self, coeffs: np.ndarray) -> float:
        """Largest scaled quadric value at a unit coefficient vector."""
        c = np.asarray(coeffs, dtype=complex).reshape(-1)
        c = c / np.linalg.norm(c)
        vals = np.abs(self.evaluate(c))
        return float(np.max(vals / self.scales()))


def _minor_quadrics(mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    n = len(mats)
    d_left, d_right = mats[0].shape
    stack = np.stack(mats)
    quadrics = []
    for r, s in combinations(range(d_left), 2):
        for p, q in combinations(range(d_right), 2):
            t = np.outer(stack[:, r, p], stack[:, s, q]) - np.outer(
                stack[:, r, q], stack[:, s, p]
            )
            quadrics.append(0.5 * (t + t.T))
    return quadrics


def minor_system(basis: SubspaceBasis, cut: Sequence[int]) -> QuadricSystem:
    """One quadric per 2x2 minor of the coefficient pencil across a cut."""
    if basis.dim < 2:
        raise PreconditionUnmetError("minor system needs a basis of dim 2 or 3")
    left, _ = basis.profile.validate_cut(cut)
    mats = [v.as_matrix(left) for v in basis.vectors]
    quadrics = _minor_quadrics(mats)
    if not quadrics:
        raise ValueError("cut produces no 2x2 minors (both sides must have dim >= 2)")
    return QuadricSystem(tuple(quadrics), basis.dim, basis, (left,))


def full_product_minor_system(basis: SubspaceBasis) -> QuadricSystem:
    """Combined minor system over every single-subsystem cut.

    A state is fully product across k subsystems exactly when each of its
    single-subsystem reduced states is pure, so the common zeros of the
    combined system are the fully-product states.
    """
    if basis.dim < 2:
        raise PreconditionUnmetError("minor system needs a basis of dim 2 or 3")
    k = basis.profile.n_subsystems
    if k < 3:
        raise PreconditionUnmetError("full product system expects k >= 3 subsystems")
    quadrics: list[np.ndarray] = []
    cuts = []
    for j in range(k):
        if basis.profile.dims[j] == 1:
            continue
        mats = [v.as_matrix((j,)) for v in basis.vectors]
        qs = _minor_quadrics(mats)
        if qs:
            quadrics.append(np.stack(qs))
            cuts.append((j,))
    if not quadrics:
        raise ValueError("all subsystems are one-dimensional")
    flat = tuple(q for block in quadrics for q in block)
    return QuadricSystem(flat, basis.dim, basis, tuple(cuts))


def _all_quadrics_negligible(qs: QuadricSystem, tol: ToleranceConfig) -> bool:
    return qs.max_norm() <= tol.membership_tol


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _poly_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a polynomial given coefficients from degree 0 upward."""
    c = np.asarray(coeffs, dtype=complex)
    top = np.max(np.abs(c))
    if top == 0:
        return np.array([], dtype=complex)
    c = c / top
    hi = len(c) - 1
    while hi > 0 and abs(c[hi]) < 1e-12:
        hi -= 1
    if hi == 0:
        return np.array([], dtype=complex)
    return np.roots(c[: hi + 1][::-1])


def _restrict_quadric(q: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[complex, complex, complex]:
    """Coefficients (t^0, t^1, t^2) of q(x + t*y)."""
    return x @ q @ x, 2.0 * (x @ q @ y), y @ q @ y


def _binary_quadric_roots(qs: QuadricSystem, rng: np.random.Generator) -> list[np.ndarray]:
    """Projective roots of the first significant quadric on CP^1."""
    rot = _random_unitary(rng, 2)
    for q in qs.quadrics:
        qr = rot.T @ q @ rot
        scale = np.linalg.norm(qr)
        if scale <= DEFAULT_TOL.membership_tol:
            continue
        # q(u, v) = A u^2 + 2 B u v + C v^2, dehomogenized at v = 1
        a, b, c = qr[0, 0], qr[0, 1], qr[1, 1]
        roots = [np.array([t, 1.0]) for t in _poly_roots(np.array([c, 2 * b, a]))]
        if abs(a) < 1e-10 * scale:
            roots.append(np.array([1.0, 0.0]))
        return [rot @ (r / np.linalg.norm(r)) for r in roots]
    return []


def _rank1_tensor_approx(tensor_form: np.ndarray) -> np.ndarray:
    """Near-best rank-one approximation of a k-way tensor, flattened."""
    dims = tensor_form.shape
    factors = []
    rest = tensor_form
    for axis in range(len(dims) - 1):
        mat = rest.reshape(dims[axis], -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        factors.append(u[:, 0])
        rest = (s[0] * vh[0, :]).reshape(dims[axis + 1 :])
    factors.append(rest / np.linalg.norm(rest) if np.linalg.norm(rest) else rest)
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def _polish_root(qs: QuadricSystem, coeffs: np.ndarray, iters: int = 80) -> np.ndarray:
    """Refine a candidate root by alternating nearest-product projections."""
    basis = qs.source
    b = basis.matrix
    dims = basis.profile.dims
    c = np.asarray(coeffs, dtype=complex)
    c = c / np.linalg.norm(c)
    best, best_res = c, qs.residual(c)
    for _ in range(iters):
        psi = (b @ c).reshape(dims)
        prod = _rank1_tensor_approx(psi)
        c_new = b.conj().T @ prod
        nrm = np.linalg.norm(c_new)
        if nrm < 1e-12:
            break
        c = c_new / nrm
        res = qs.residual(c)
        if res < best_res:
            best, best_res = c, res
        if best_res < 1e-15:
            break
    return best


def _cluster_points(
    points: Sequence[np.ndarray], residuals: Sequence[float], tol: ToleranceConfig
) -> list[np.ndarray]:
    """Greedy chordal clustering keeping the lowest-residual representative."""
    order = np.argsort(residuals)
    reps: list[np.ndarray] = []
    for i in order:
        p = points[i]
        if all(chordal_distance(p, r) > tol.root_cluster_tol for r in reps):
            reps.append(p)
    return reps


def _verified_points(
    qs: QuadricSystem,
    candidates: Sequence[np.ndarray],
    tol: ToleranceConfig,
    polish: bool = True,
) -> list[np.ndarray]:
    kept, residuals = [], []
    for c in candidates:
        nrm = np.linalg.norm(c)
        if nrm < 1e-12:
            continue
        c = c / nrm
        res = qs.residual(c)
        if res > _PREFILTER_FACTOR * tol.membership_tol:
            continue
        if polish:
            c = _polish_root(qs, c)
            res = qs.residual(c)
        if res <= tol.membership_tol:
            kept.append(c)
            residuals.append(res)
    return _cluster_points(kept, residuals, tol)


def _resultant_coefficients(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Coefficients of Res_w(q1, q2)(u, 1) from degree 0 to 4.

    Both quadrics are written as quadratics in w with coefficients that are
    polynomials in (u, v); the Sylvester determinant is a homogeneous quartic
    recovered by interpolation at fifth roots of unity.
    """
    nodes = np.exp(2j * np.pi * np.arange(5) / 5.0)
    vals = np.empty(5, dtype=complex)
    for i, u in enumerate(nodes):
        v = 1.0
        syl = np.zeros((4, 4), dtype=complex)
        for row, q in enumerate((q1, q2)):
            a = q[2, 2]
            bq = 2.0 * (q[0, 2] * u + q[1, 2] * v)
            cq = q[0, 0] * u * u + 2.0 * q[0, 1] * u * v + q[1, 1] * v * v
            syl[2 * row, :3] = (a, bq, cq)
            syl[2 * row + 1, 1:] = (a, bq, cq)
        vals[i] = np.linalg.det(syl)
    return np.fft.fft(vals) / 5.0


def _lift_candidates(q1: np.ndarray, q2: np.ndarray, u: complex, v: complex) -> list[np.ndarray]:
    out = []
    for q in (q1, q2):
        a = q[2, 2]
        bq = 2.0 * (q[0, 2] * u + q[1, 2] * v)
        cq = q[0, 0] * u * u + 2.0 * q[0, 1] * u * v + q[1, 1] * v * v
        for w in _poly_roots(np.array([cq, bq, a])):
            out.append(np.array([u, v, w]))
        if abs(a) < 1e-12:
            out.append(np.array([0.0, 0.0, 1.0]))
    return out


def solve_isolated(
    qs: QuadricSystem,
    rng: np.random.Generator,
    tol: ToleranceConfig = DEFAULT_TOL,
    n_pairs: int = 4,
) -> list[ProjectivePoint]:
    """All isolated common zeros of the quadric system.

    Repeats a resultant elimination over independent random pairs of quadric
    combinations and keeps only candidates at which every quadric vanishes.
    Raises :class:`NotIsolatedError` when the resultant degenerates or the
    attempts disagree, both of which indicate a positive-dimensional locus.
    """
    if _all_quadrics_negligible(qs, tol):
        raise PreconditionUnmetError("all quadrics vanish; the solution set is everything")
    if qs.n_vars == 2:
        attempts = [
            _verified_points(qs, _binary_quadric_roots(qs, rng), tol) for _ in range(2)
        ]
        if not _attempts_agree(attempts, tol):
            raise NotIsolatedError("binary quadric attempts disagree")
        return _as_projective(attempts[0])

    stack = np.stack(qs.quadrics)
    norms = np.linalg.norm(stack.reshape(len(qs.quadrics), -1), axis=1)
    active = stack[norms > tol.membership_tol]
    attempts = []
    for _ in range(n_pairs):
        weights = rng.standard_normal((2, len(active))) + 1j * rng.standard_normal(
            (2, len(active))
        )
        q1 = np.tensordot(weights[0], active, axes=1)
        q2 = np.tensordot(weights[1], active, axes=1)
        q1 = q1 / np.linalg.norm(q1)
        q2 = q2 / np.linalg.norm(q2)
        rot = _random_unitary(rng, 3)
        q1r, q2r = rot.T @ q1 @ rot, rot.T @ q2 @ rot
        res = _resultant_coefficients(q1r, q2r)
        if np.max(np.abs(res)) <= _RESULTANT_TOL:
            raise NotIsolatedError("resultant vanishes identically")
        candidates = []
        for u in _poly_roots(res):
            candidates.extend(_lift_candidates(q1r, q2r, u, 1.0))
        if abs(res[4]) < 1e-10 * np.max(np.abs(res)):
            candidates.extend(_lift_candidates(q1r, q2r, 1.0, 0.0))
        candidates = [rot @ c for c in candidates]
        attempts.append(_verified_points(qs, candidates, tol))
    if not _attempts_agree(attempts, tol):
        raise NotIsolatedError("random quadric pairs disagree persistently")
    return _as_projective(attempts[0])


def _attempts_agree(attempts: list[list[np.ndarray]], tol: ToleranceConfig) -> bool:
    first = attempts[0]
    for other in attempts[1:]:
        if len(other) != len(first):
            return False
        for p in other:
            if min((chordal_distance(p, q) for q in first), default=np.inf) > 10 * tol.root_cluster_tol:
                return False
    return True


def _as_projective(points: Sequence[np.ndarray]) -> list[ProjectivePoint]:
    pts = [ProjectivePoint(tuple(p)) for p in points]
    return sorted(pts, key=lambda p: tuple((round(z.real, 9), round(z.imag, 9)) for z in p.coeffs))


@dataclass(frozen=True)
class ComponentReport:
    """Shape of the solution variety of a quadric system.

    ``kind`` is one of ``empty``, ``isolated``, ``line``, ``two_lines``,
    ``conic`` or ``full_plane``.  ``points`` holds isolated solutions,
    ``witnesses`` holds verified sample points on curve components,
    ``line_bases`` spans each line component, and ``extra_isolated`` holds
    isolated solutions lying off a curve component.
    """

    kind: str
    points: tuple[ProjectivePoint, ...] = ()
    witnesses: tuple[ProjectivePoint, ...] = ()
    line_bases: tuple[tuple[ProjectivePoint, ProjectivePoint], ...] = ()
    extra_isolated: tuple[ProjectivePoint, ...] = ()
    intersection: ProjectivePoint | None = None

    def has_curve(self) -> bool:
        return self.kind in ("line", "two_lines", "conic", "full_plane")

    def all_isolated(self) -> tuple[ProjectivePoint, ...]:
        return self.points + self.extra_isolated


def _null_vector(rows: np.ndarray) -> np.ndarray:
    """Unit x with rows @ x = 0 (bilinear, no conjugation)."""
    _, _, vh = np.linalg.svd(rows)
    return np.conj(vh[-1])


def _line_annihilator(points: np.ndarray) -> np.ndarray:
    return _null_vector(points)


def _divide_by_linear(q: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, float]:
    """Factor q = sym(g h^T) and return (h, relative residual)."""
    i = int(np.argmax(np.abs(g)))
    h = np.empty(3, dtype=complex)
    h[i] = q[i, i] / g[i]
    for j in range(3):
        if j != i:
            h[j] = (2.0 * q[i, j] - h[i] * g[j]) / g[i]
    recon = 0.5 * (np.outer(g, h) + np.outer(h, g))
    denom = max(np.linalg.norm(q), 1e-30)
    return h, float(np.linalg.norm(recon - q) / denom)


def _spread_subset(points: list[np.ndarray], count: int) -> list[np.ndarray]:
    """Greedy farthest-point subset for well-conditioned witnesses."""
    chosen = [points[0]]
    while len(chosen) < min(count, len(points)):
        best, best_d = None, -1.0
        for p in points:
            d = min(chordal_distance(p, c) for c in chosen)
            if d > best_d:
                best, best_d = p, d
        chosen.append(best)
    return chosen


def _probe_lines(
    qs: QuadricSystem, rng: np.random.Generator, tol: ToleranceConfig, n_lines: int
) -> tuple[int, list[np.ndarray]]:
    """Intersect random projective lines with the solution variety."""
    hits: list[np.ndarray] = []
    lines_hit = 0
    scales = qs.scales()
    for _ in range(n_lines):
        x = haar_vector(rng, 3)
        y = haar_vector(rng, 3)
        y = y - np.vdot(x, y) * x
        y = y / np.linalg.norm(y)
        candidates: list[np.ndarray] = [y]
        restricted_all_zero = True
        for q, scale in zip(qs.quadrics, scales):
            c0, c1, c2 = _restrict_quadric(q, x, y)
            if max(abs(c0), abs(c1), abs(c2)) <= 1e-11 * scale:
                continue
            restricted_all_zero = False
            for t in _poly_roots(np.array([c0, c1, c2])):
                candidates.append(x + t * y)
            break
        if restricted_all_zero:
            candidates.extend([x, y])
        found = False
        for c in candidates:
            nrm = np.linalg.norm(c)
            if nrm < 1e-12:
                continue
            c = c / nrm
            if qs.residual(c) <= tol.membership_tol:
                hits.append(c)
                found = True
        if found:
            lines_hit += 1
    return lines_hit, hits


def detect_positive_dimensional(
    qs: QuadricSystem,
    rng: np.random.Generator,
    tol: ToleranceConfig = DEFAULT_TOL,
    n_lines: int = 16,
    isolated_hint: Sequence[ProjectivePoint] | None = None,
) -> ComponentReport:
    """Classify the solution variety, including positive-dimensional parts.

    Every random projective line meets every curve component, so a clean
    instance hits either all probes (a curve exists) or none (isolated
    solutions only); mixed outcomes raise :class:`InconsistentProbesError`.
    Curves are told apart by the span of their sampled points and by the
    symmetric rank of the single conic through them; a line component is
    divided out of the system to recover isolated solutions off the line.
    """
    if _all_quadrics_negligible(qs, tol):
        return ComponentReport(kind="full_plane")
    if qs.n_vars == 2:
        points = _isolated_or_retry(qs, rng, tol, isolated_hint)
        return ComponentReport(
            kind="isolated" if points else "empty", points=tuple(points)
        )

    lines_hit, hits = _probe_lines(qs, rng, tol, n_lines)
    if lines_hit == 0:
        points = _isolated_or_retry(qs, rng, tol, isolated_hint)
        return ComponentReport(
            kind="isolated" if points else "empty", points=tuple(points)
        )
    if lines_hit < n_lines:
        raise InconsistentProbesError(
            f"only {lines_hit} of {n_lines} random lines met the variety"
        )

    stack = np.stack(hits)
    span_rank = numeric_rank(stack, tol)
    if span_rank <= 1:
        raise InconsistentProbesError("curve probes collapsed to a single point")
    if span_rank == 2:
        return _line_report(qs, stack, tol)
    return _plane_curve_report(qs, stack, tol)


def _isolated_or_retry(
    qs: QuadricSystem,
    rng: np.random.Generator,
    tol: ToleranceConfig,
    isolated_hint: Sequence[ProjectivePoint] | None,
) -> list[ProjectivePoint]:
    if isolated_hint is not None:
        return list(isolated_hint)
    try:
        return solve_isolated(qs, rng, tol, n_pairs=8)
    except NotIsolatedError as exc:
        raise InconsistentProbesError(
            "no curve found by probes but isolated extraction keeps failing"
        ) from exc


def _line_report(qs: QuadricSystem, hit_stack: np.ndarray, tol: ToleranceConfig) -> ComponentReport:
    u, _, _ = np.linalg.svd(hit_stack.T, full_matrices=False)
    e1, e2 = u[:, 0], u[:, 1]
    annihilator = _line_annihilator(np.stack([e1, e2]))
    cofactors = []
    for q in qs.quadrics:
        if np.linalg.norm(q) <= tol.membership_tol:
            continue
        h, resid = _divide_by_linear(q, annihilator)
        if resid > 1e-6:
            raise InconsistentProbesError(
                "a quadric is not divisible by the detected line"
            )
        cofactors.append(h)
    basis_pts = (ProjectivePoint(tuple(e1)), ProjectivePoint(tuple(e2)))
    hmat = np.stack(cofactors)
    hrank = numeric_rank(hmat, tol)
    extra: tuple[ProjectivePoint, ...] = ()
    if hrank == 2:
        p = _null_vector(hmat)
        p = _polish_root(qs, p)
        on_line = chordal_distance(p, _project_to_line(p, e1, e2)) <= tol.root_cluster_tol
        if qs.residual(p) <= tol.membership_tol and not on_line:
            extra = (ProjectivePoint(tuple(p)),)
    elif hrank == 1:
        if chordal_distance(cofactors[0], annihilator) > tol.root_cluster_tol:
            raise InconsistentProbesError(
                "cofactor line contradicts the sampled point span"
            )
    return ComponentReport(
        kind="line",
        witnesses=basis_pts,
        line_bases=(basis_pts,),
        extra_isolated=extra,
    )


def _project_to_line(p: np.ndarray, e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    basis = np.stack([e1, e2], axis=1)
    proj = basis @ (basis.conj().T @ p)
    n = np.linalg.norm(proj)
    return proj / n if n > 0 else e1


def _plane_curve_report(
    qs: QuadricSystem, hit_stack: np.ndarray, tol: ToleranceConfig
) -> ComponentReport:
    rows = []
    for p in hit_stack:
        p1, p2, p3 = p
        rows.append(
            [p1 * p1, p2 * p2, p3 * p3, 2 * p1 * p2, 2 * p1 * p3, 2 * p2 * p3]
        )
    rows = np.asarray(rows)
    _, svals, vh = np.linalg.svd(rows)
    if svals[-1] > 1e-6 * svals[0]:
        raise InconsistentProbesError("curve points do not lie on a single conic")
    coeff = np.conj(vh[-1])
    fitted = np.array(
        [
            [coeff[0], coeff[3], coeff[4]],
            [coeff[3], coeff[1], coeff[5]],
            [coeff[4], coeff[5], coeff[2]],
        ]
    )
    rank = numeric_rank(fitted, tol.replace(rank_rel_tol=1e-6))
    pts = [p for p in hit_stack]
    if rank == 3:
        witnesses = tuple(ProjectivePoint(tuple(p)) for p in _spread_subset(pts, 6))
        return ComponentReport(kind="conic", witnesses=witnesses)
    if rank != 2:
        raise InconsistentProbesError(f"fitted conic has unexpected rank {rank}")
    node = _null_vector(fitted)
    far = max(pts, key=lambda p: chordal_distance(p, node))
    l1 = _line_annihilator(np.stack([node, far]))
    group1, group2 = [], []
    for p in pts:
        (group1 if abs(p @ l1) <= 1e-7 * np.linalg.norm(l1) else group2).append(p)
    if not group2:
        raise InconsistentProbesError("two-line split found only one line")
    far2 = max(group2, key=lambda p: chordal_distance(p, node))
    l2 = _line_annihilator(np.stack([node, far2]))
    for p in group2:
        if abs(p @ l2) > 1e-6 * np.linalg.norm(l2):
            raise InconsistentProbesError("curve points fall outside both lines")
    line1 = _orthonormal_line_basis(node, far)
    line2 = _orthonormal_line_basis(node, far2)
    return ComponentReport(
        kind="two_lines",
        witnesses=tuple(
            ProjectivePoint(tuple(p)) for p in (line1[0], line1[1], line2[0], line2[1])
        ),
        line_bases=(
            (ProjectivePoint(tuple(line1[0])), ProjectivePoint(tuple(line1[1]))),
            (ProjectivePoint(tuple(line2[0])), ProjectivePoint(tuple(line2[1]))),
        ),
        intersection=ProjectivePoint(tuple(node)),
    )


def _orthonormal_line_basis(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e1 = a / np.linalg.norm(a)
    e2 = b - np.vdot(e1, b) * e1
    return e1, e2 / np.linalg.norm(e2)


@dataclass(frozen=True)
class ProductStateSet:
    """Product states of a subspace and the local dimensions they span."""

    report: ComponentReport
    spanning_products: tuple[StateVector, ...]
    dim_s_sep: int
    cut: tuple[int, ...] | None
    a_sep_dim: int | None = None
    b_sep_dim: int | None = None
    general_position_a: bool | None = None
    general_position_b: bool | None = None
    factor_pairs: tuple[tuple[StateVector, StateVector], ...] = field(default=())


def _spanning_coefficients(report: ComponentReport, n_vars: int) -> list[np.ndarray]:
    """Up to three independent coefficient vectors covering the variety."""
    if report.kind == "full_plane":
        return [np.eye(n_vars, dtype=complex)[i] for i in range(n_vars)]
    coeffs: list[np.ndarray] = []
    if report.kind == "line":
        coeffs.extend(p.array for p in report.line_bases[0])
    elif report.kind == "two_lines":
        (a1, a2), (b1, b2) = report.line_bases
        # the second entry of each orthonormal pair avoids the shared node
        coeffs.extend([a1.array, a2.array, b2.array])
    elif report.kind == "conic":
        coeffs.extend(p.array for p in report.witnesses[:3])
    coeffs.extend(p.array for p in report.all_isolated())
    if not coeffs:
        return []
    stack = np.stack(coeffs)
    chosen: list[np.ndarray] = []
    for p in stack:
        trial = np.stack(chosen + [p])
        if numeric_rank(trial) == len(trial):
            chosen.append(p)
        if len(chosen) == min(3, n_vars):
            break
    return chosen


def _pairwise_independent(vectors: list[np.ndarray], tol: ToleranceConfig) -> bool:
    for a, b in combinations(vectors, 2):
        if numeric_rank(np.stack([a, b]), tol) < 2:
            return False
    return True


def find_product_states(
    basis: SubspaceBasis,
    cut: Sequence[int] | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
    n_pairs: int = 4,
    n_lines: int = 16,
) -> ProductStateSet:
    """Find all product states of a subspace across a bipartite cut.

    Orchestrates the minor system, isolated-root extraction and
    positive-dimensional detection, then converts coefficient solutions into
    ambient product states.  Every returned state passes a Schmidt-rank-one
    check across the cut.
    """
    if basis.dim > 3:
        raise UnsupportedRankError("only subspaces of dimension up to 3 are handled")
    if cut is None:
        if basis.profile.n_subsystems != 2:
            raise ValueError("cut is required for profiles with more than two subsystems")
        cut = (0,)
    left, _ = basis.profile.validate_cut(cut)

    if basis.dim == 1:
        v = basis.vectors[0]
        if schmidt_ratio(v, left) <= np.sqrt(tol.membership_tol):
            report = ComponentReport(kind="isolated", points=(ProjectivePoint((1.0,)),))
        else:
            report = ComponentReport(kind="empty")
        return _finish_product_set(basis, report, left, tol)

    qs = minor_system(basis, left)
    report = _solve_variety(qs, tol, seed, n_pairs, n_lines)
    return _finish_product_set(basis, report, left, tol)


def _solve_variety(
    qs: QuadricSystem, tol: ToleranceConfig, seed: int, n_pairs: int, n_lines: int
) -> ComponentReport:
    if _all_quadrics_negligible(qs, tol):
        return ComponentReport(kind="full_plane")
    rng = derived_rng(seed, 0)
    try:
        points = solve_isolated(qs, rng, tol, n_pairs=n_pairs)
        return ComponentReport(
            kind="isolated" if points else "empty", points=tuple(points)
        )
    except NotIsolatedError:
        rng = derived_rng(seed, 1)
        return detect_positive_dimensional(qs, rng, tol, n_lines=n_lines)


def _finish_product_set(
    basis: SubspaceBasis,
    report: ComponentReport,
    cut: tuple[int, ...],
    tol: ToleranceConfig,
) -> ProductStateSet:
    coeffs = _spanning_coefficients(report, basis.dim)
    products = []
    for c in coeffs:
        state = basis.coefficients_to_state(c)
        ratio = schmidt_ratio(state, cut)
        if ratio > tol.membership_tol:
            raise InconsistentProbesError(
                f"reported product state fails the Schmidt test ({ratio:.2e})"
            )
        products.append(state)
    dim_s_sep = numeric_rank(np.stack([p.amplitudes for p in products]), tol) if products else 0

    pairs = tuple((tuple(rank_one_factors(p, cut))) for p in products)
    a_dim = b_dim = None
    gp_a = gp_b = None
    if pairs:
        alphas = [a.amplitudes for a, _ in pairs]
        betas = [b.amplitudes for _, b in pairs]
        a_dim = numeric_rank(np.stack(alphas), tol)
        b_dim = numeric_rank(np.stack(betas), tol)
        if dim_s_sep == 3:
            gp_a = a_dim == 3 or _pairwise_independent(alphas, tol)
            gp_b = b_dim == 3 or _pairwise_independent(betas, tol)
    return ProductStateSet(
        report=report,
        spanning_products=tuple(products),
        dim_s_sep=dim_s_sep,
        cut=cut,
        a_sep_dim=a_dim,
        b_sep_dim=b_dim,
        general_position_a=gp_a,
        general_position_b=gp_b,
        factor_pairs=pairs,
    )
