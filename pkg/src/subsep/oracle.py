"""Independent verification: brute-force product search and fuzzing suites.

The grid oracle minimizes the rank-one defect sigma_2/sigma_1 of the
coefficient pencil directly, with no shared machinery with the quadric
solver, so agreement between the two is meaningful evidence.  The Monte
Carlo suites check classified separable sets against the partial-transpose
criterion, which is exact for rank up to three.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classify import ClassificationResult, classify_bipartite
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
)
from .errors import PreconditionUnmetError
from .linalg import DensityMatrix, DimensionProfile, StateVector, SubspaceBasis, tensor_all
from .multipartite import (
    MultiClassResult,
    MultipartiteInstance,
    classify_multipartite_subspace,
    paired_factors_independent,
)
from .products import ProjectivePoint, chordal_distance
from .sampling import derived_rng, ginibre_density_on_subspace, haar_vector
from .separability import is_ppt, membership, min_pt_eigenvalue_all_cuts
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "VerificationReport",
    "brute_force_product_search",
    "sample_separable",
    "monte_carlo_class_check",
    "random_product_spanned_basis",
    "random_multipartite_instance",
    "run_suite",
]


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a fuzzing run; disagreements must be zero to pass."""

    trials: int
    disagreements: int
    worst_residual: float
    failures: tuple[dict, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "disagreements": self.disagreements,
            "worst_residual": self.worst_residual,
            "failures": list(self.failures),
        }


def _angles_to_coeffs(angles: np.ndarray, n_vars: int) -> np.ndarray:
    if n_vars == 2:
        theta, phi = angles[..., 0], angles[..., 1]
        return np.stack(
            [np.cos(theta), np.sin(theta) * np.exp(1j * phi)], axis=-1
        )
    t1, t2, p1, p2 = angles[..., 0], angles[..., 1], angles[..., 2], angles[..., 3]
    return np.stack(
        [
            np.cos(t1),
            np.sin(t1) * np.cos(t2) * np.exp(1j * p1),
            np.sin(t1) * np.sin(t2) * np.exp(1j * p2),
        ],
        axis=-1,
    )


def _defect_sq(coeffs: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """(sigma_2 / sigma_1)^2 of the pencil at (batched) coefficient vectors.

    The squared ratio is smooth at its zeros, which keeps the descent
    well-behaved there; take a square root for the plain ratio.
    """
    pencil = np.tensordot(coeffs, mats, axes=([-1], [0]))
    if pencil.shape[-2] == 2:
        # closed form via the 2x2 Gram matrix, much faster than batched SVD
        gram = pencil @ np.swapaxes(pencil.conj(), -1, -2)
        t = gram[..., 0, 0].real + gram[..., 1, 1].real
        d = np.clip(
            gram[..., 0, 0].real * gram[..., 1, 1].real
            - (gram[..., 0, 1].real ** 2 + gram[..., 0, 1].imag ** 2),
            0.0,
            None,
        )
        disc = np.sqrt(np.clip(t * t / 4.0 - d, 0.0, None))
        hi = t / 2.0 + disc
        lo = np.clip(t / 2.0 - disc, 0.0, None)
        hi = np.where(hi > 0, hi, 1.0)
        return lo / hi
    s = np.linalg.svd(pencil, compute_uv=False)
    lead = np.where(s[..., 0] > 0, s[..., 0], 1.0)
    return (s[..., 1] / lead) ** 2


def brute_force_product_search(
    basis: SubspaceBasis,
    cut: Sequence[int] | None = None,
    grid_steps: int = 24,
    tol: ToleranceConfig = DEFAULT_TOL,
    value_tol: float = 1e-7,
    max_refine: int = 600,
) -> list[ProjectivePoint]:
    """Grid-plus-refinement search for rank-one members of the pencil.

    Minimizes sigma_2/sigma_1 over an angular grid on projective coefficient
    space, refines every grid-local minimum by batched per-axis coordinate
    descent with shrinking steps, and reports clustered minima below
    ``value_tol``.  Independent of the quadric solver by construction.
    """
    if grid_steps < 16:
        raise ValueError("grid_steps must be at least 16")
    if cut is None:
        cut = (0,)
    left, _ = basis.profile.validate_cut(cut)
    mats = np.stack([v.as_matrix(left) for v in basis.vectors])
    n_vars = basis.dim
    if n_vars == 1:
        ratio = float(np.sqrt(_defect_sq(np.array([[1.0 + 0j]]), mats)[0]))
        return [ProjectivePoint((1.0,))] if ratio <= value_tol else []

    if n_vars == 2:
        thetas = np.linspace(0.0, np.pi / 2.0, grid_steps)
        phis = np.linspace(0.0, 2.0 * np.pi, 2 * grid_steps, endpoint=False)
        grid = np.stack(np.meshgrid(thetas, phis, indexing="ij"), axis=-1)
        n_polar = 1
    else:
        thetas = np.linspace(0.0, np.pi / 2.0, grid_steps)
        phis = np.linspace(0.0, 2.0 * np.pi, grid_steps, endpoint=False)
        grid = np.stack(
            np.meshgrid(thetas, thetas, phis, phis, indexing="ij"), axis=-1
        )
        n_polar = 2
    values = _defect_sq(_angles_to_coeffs(grid, n_vars), mats)

    # polar angles are not periodic; pad them so boundaries have no fake neighbors
    local_min = np.ones_like(values, dtype=bool)
    for axis in range(values.ndim):
        for shift in (1, -1):
            rolled = np.roll(values, shift, axis=axis)
            if axis < n_polar:
                edge = [slice(None)] * values.ndim
                edge[axis] = 0 if shift == 1 else -1
                rolled[tuple(edge)] = np.inf
            local_min &= values <= rolled
    # refine only minima that could plausibly reach zero
    local_min &= values < 0.04
    candidates = grid[local_min].reshape(-1, 2 * (n_vars - 1))
    cand_values = values[local_min].reshape(-1)
    order = np.argsort(cand_values)
    candidates = candidates[order]

    # chart degeneracies duplicate whole sheets of candidates; drop exact copies
    coeffs = _angles_to_coeffs(candidates, n_vars)
    keep = _first_unique(coeffs)
    candidates = candidates[keep][:max_refine]

    refined, refined_values = _coordinate_descent(
        candidates, mats, n_vars, theta_step=float(thetas[1] - thetas[0])
    )
    found = _angles_to_coeffs(refined, n_vars)
    ok = refined_values <= value_tol**2
    reps: list[np.ndarray] = []
    for p in found[ok]:
        p = p / np.linalg.norm(p)
        if all(chordal_distance(p, r) > tol.root_cluster_tol for r in reps):
            reps.append(p)
    return [ProjectivePoint(tuple(p)) for p in reps]


def _first_unique(coeffs: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    flat = coeffs.reshape(len(coeffs), -1)
    kept: list[int] = []
    for i in range(len(flat)):
        c = flat[i]
        if all(chordal_distance(c, flat[j]) > eps for j in kept[-64:]):
            kept.append(i)
    return np.array(kept, dtype=int)


def _coordinate_descent(
    starts: np.ndarray,
    mats: np.ndarray,
    n_vars: int,
    theta_step: float,
    rounds: int = 60,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched per-axis descent with shrinking steps.

    Each round proposes one step up and one step down along every angle for
    every candidate; steps that fail to improve shrink geometrically, so the
    iterate converges to the nearest local minimum of the defect.
    """
    x = np.asarray(starts, dtype=float).copy()
    if x.size == 0:
        return x, np.empty(0)
    n_axes = x.shape[1]
    steps = np.full_like(x, 0.75 * theta_step)
    values = _defect_sq(_angles_to_coeffs(x, n_vars), mats)
    for _ in range(rounds):
        for axis in range(n_axes):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[:, axis] += sign * steps[:, axis]
                tv = _defect_sq(_angles_to_coeffs(trial, n_vars), mats)
                better = tv < values
                x[better] = trial[better]
                values = np.where(better, tv, values)
            steps[:, axis] *= 0.55
        if np.all(steps < 1e-10):
            break
    return x, values


def sample_separable(
    desc: SeparableSetDescription,
    rng: np.random.Generator,
    n: int,
) -> list[DensityMatrix]:
    """Random states from a described separable set (Dirichlet mixtures)."""
    if isinstance(desc, NoSeparable):
        raise PreconditionUnmetError("cannot sample from an empty separable set")
    out = []
    for _ in range(n):
        out.append(_sample_one(desc, rng))
    return out


def _sample_one(desc: SeparableSetDescription, rng: np.random.Generator) -> DensityMatrix:
    if isinstance(desc, SinglePoint):
        return desc.state.projector()
    if isinstance(desc, Segment):
        w = rng.dirichlet(np.ones(2))
        return DensityMatrix.mixture(w, [s.projector() for s in desc.states])
    if isinstance(desc, Triangle):
        w = rng.dirichlet(np.ones(3))
        return DensityMatrix.mixture(w, [s.projector() for s in desc.states])
    if isinstance(desc, AllStates):
        return ginibre_density_on_subspace(rng, desc.basis)
    if isinstance(desc, LocalBall):
        return ginibre_density_on_subspace(rng, desc.ambient)
    if isinstance(desc, Cone):
        w = rng.dirichlet(np.ones(2))
        ball = ginibre_density_on_subspace(rng, desc.ball.ambient)
        return DensityMatrix.mixture(w, [desc.apex.projector(), ball])
    if isinstance(desc, TwoBalls):
        w = rng.dirichlet(np.ones(2))
        return DensityMatrix.mixture(
            w,
            [
                ginibre_density_on_subspace(rng, desc.ball_a.ambient),
                ginibre_density_on_subspace(rng, desc.ball_b.ambient),
            ],
        )
    if isinstance(desc, ProductCurve):
        m = 9  # Caratheodory bound for the 8-dimensional body
        w = rng.dirichlet(np.ones(m))
        points = [desc.pair_map.curve_state(haar_vector(rng, 2)) for _ in range(m)]
        return DensityMatrix.mixture(w, [p.projector() for p in points])
    raise TypeError(f"cannot sample from {type(desc).__name__}")


def _digest(rho: DensityMatrix) -> str:
    return hex(abs(hash(np.round(rho.entries, 9).tobytes())))


def _min_pt(rho: DensityMatrix, cut, tol) -> float:
    if rho.profile.n_subsystems == 2 or cut is not None:
        return is_ppt(rho, cut, tol)[1]
    return min_pt_eigenvalue_all_cuts(rho, tol)


def monte_carlo_class_check(
    basis: SubspaceBasis,
    result: ClassificationResult | MultiClassResult,
    n: int,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> VerificationReport:
    """Cross-validate a classified separable set against the PPT oracle.

    Half the trials sample the claimed separable set, which must be PPT
    across every relevant cut; half sample random states on the subspace,
    where membership rejection must coincide with a negative partial
    transpose and acceptance with a positive one.
    """
    rng = derived_rng(seed, 17)
    desc = result.description
    cut = getattr(result, "cut", None)
    failures: list[dict] = []
    worst = 0.0
    trials = 0

    n_sep = 0 if isinstance(desc, NoSeparable) else n // 2
    for i in range(n_sep):
        rho = _sample_one(desc, rng)
        eig = _min_pt(rho, cut, tol)
        trials += 1
        if eig < -tol.psd_tol:
            worst = max(worst, -eig)
            failures.append(
                {
                    "trial": i,
                    "digest": _digest(rho),
                    "expected": "PPT (sampled from the separable set)",
                    "got": f"min PT eigenvalue {eig:.3e}",
                }
            )

    for i in range(n - n_sep):
        rho = ginibre_density_on_subspace(rng, basis)
        verdict = membership(rho, desc, tol, carrier=basis)
        eig = _min_pt(rho, cut, tol)
        trials += 1
        if verdict.separable and eig < -tol.psd_tol:
            worst = max(worst, -eig)
            failures.append(
                {
                    "trial": n_sep + i,
                    "digest": _digest(rho),
                    "expected": "PPT (membership accepted)",
                    "got": f"min PT eigenvalue {eig:.3e}",
                }
            )
        elif not verdict.separable and eig >= -tol.psd_tol:
            worst = max(worst, abs(eig))
            failures.append(
                {
                    "trial": n_sep + i,
                    "digest": _digest(rho),
                    "expected": "NPT (membership rejected)",
                    "got": f"min PT eigenvalue {eig:.3e}",
                }
            )
    return VerificationReport(
        trials=trials,
        disagreements=len(failures),
        worst_residual=worst,
        failures=tuple(failures),
    )


def random_product_spanned_basis(
    rng: np.random.Generator, dims: tuple[int, int], n_products: int = 3
) -> SubspaceBasis:
    """Subspace spanned by independent random product states."""
    profile = DimensionProfile(dims)
    while True:
        products = []
        for _ in range(n_products):
            a = StateVector(haar_vector(rng, dims[0]), DimensionProfile((dims[0],)))
            b = StateVector(haar_vector(rng, dims[1]), DimensionProfile((dims[1],)))
            products.append(tensor_all([a, b]))
        basis = SubspaceBasis(tuple(products), profile)
        if basis.dim == n_products:
            return basis


def random_multipartite_instance(
    rng: np.random.Generator, k: int, dims: Sequence[int] | None = None
) -> MultipartiteInstance:
    """Random genuinely multipartite product-spanned instance.

    Each subsystem draws a factor pattern (independent when the local
    dimension allows, general position, or a coinciding pair) such that not
    every subsystem shares the same coinciding pair, so the three assembled
    products are linearly independent.
    """
    if dims is None:
        dims = [int(rng.integers(2, 4)) for _ in range(k)]
    while True:
        rows: list[list[StateVector]] = [[], [], []]
        for d in dims:
            profile = DimensionProfile((int(d),))
            choices = ["general_position", "equal"]
            if d >= 3:
                choices.append("independent")
            kind = choices[int(rng.integers(0, len(choices)))]
            if kind == "independent":
                col = [StateVector(haar_vector(rng, d), profile) for _ in range(3)]
            elif kind == "general_position":
                a = StateVector(haar_vector(rng, d), profile)
                b = StateVector(haar_vector(rng, d), profile)
                w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                w /= np.abs(w).min()
                c = StateVector(w[0] * a.amplitudes + w[1] * b.amplitudes, profile)
                col = [a, b, c]
            else:
                a = StateVector(haar_vector(rng, d), profile)
                b = StateVector(haar_vector(rng, d), profile)
                pair = int(rng.integers(0, 3))
                if pair == 0:
                    col = [a, a, b]
                elif pair == 1:
                    col = [a, b, a]
                else:
                    col = [b, a, a]
            for i in range(3):
                rows[i].append(col[i])
        inst = MultipartiteInstance.from_factor_table(rows)
        if inst.product_rank() == 3:
            return inst


def _fixture_result(name: str, tol: ToleranceConfig, seed: int):
    from .fixtures import fixture_basis

    basis, tag = fixture_basis(name)
    if basis.profile.n_subsystems == 2:
        result = classify_bipartite(basis, None, tol, seed)
    else:
        result = classify_multipartite_subspace(basis, tol, seed)
    return basis, tag, result


def suite_classes(samples: int, seed: int, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Classify every fixture and fuzz its separable set against PPT."""
    from .fixtures import fixture_names

    out = {"name": "classes", "fixtures": {}, "disagreements": 0}
    for name in fixture_names():
        basis, tag, result = _fixture_result(name, tol, seed)
        got = result.tag.value if hasattr(result.tag, "value") else result.tag
        report = monte_carlo_class_check(basis, result, samples, seed, tol)
        tag_ok = got == tag
        out["fixtures"][name] = {
            "expected_tag": tag,
            "tag": got,
            "tag_ok": tag_ok,
            "report": report.to_dict(),
        }
        out["disagreements"] += report.disagreements + (0 if tag_ok else 1)
    return out


def suite_oracle(samples: int, seed: int, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Product finder versus grid oracle on random product-spanned subspaces."""
    from .products import find_product_states

    out = {"name": "oracle", "trials": 0, "disagreements": 0, "failures": []}
    rng = derived_rng(seed, 23)
    dims_cycle = [(2, 2), (2, 3)]
    for i in range(samples):
        dims = dims_cycle[i % 2]
        basis = random_product_spanned_basis(rng, dims)
        pset = find_product_states(basis, (0,), tol, seed=seed + i)
        oracle_points = brute_force_product_search(
            basis, (0,), grid_steps=16, tol=tol, max_refine=24
        )
        ok, detail = _solution_sets_agree(basis, pset, oracle_points, tol)
        out["trials"] += 1
        if not ok:
            out["disagreements"] += 1
            out["failures"].append({"trial": i, "dims": list(dims), "detail": detail})
    return out


def _distance_to_report(point: ProjectivePoint, basis: SubspaceBasis, pset) -> float:
    """Chordal-scale distance from a point to the reported solution variety."""
    report = pset.report
    best = np.inf
    arr = point.array
    for q in report.all_isolated():
        best = min(best, point.distance(q))
    if report.kind == "full_plane":
        return 0.0
    for line in report.line_bases:
        line_basis = np.stack([line[0].array, line[1].array], axis=1)
        proj = line_basis @ (line_basis.conj().T @ arr)
        if np.linalg.norm(proj) > 0:
            best = min(best, chordal_distance(arr, proj))
    if report.kind == "conic":
        from .products import minor_system

        qs = minor_system(basis, pset.cut)
        best = min(best, qs.residual(arr))
    return best


def _solution_sets_agree(
    basis: SubspaceBasis, pset, oracle_points, tol: ToleranceConfig
) -> tuple[bool, str]:
    agree_tol = tol.root_cluster_tol
    for q in pset.report.all_isolated():
        if not oracle_points:
            return False, "finder has isolated points the oracle missed"
        if min(q.distance(p) for p in oracle_points) > agree_tol:
            return False, f"finder point {q.coeffs} not found by oracle"
    if not pset.report.has_curve():
        for p in oracle_points:
            if not pset.report.points or min(
                p.distance(q) for q in pset.report.all_isolated()
            ) > agree_tol:
                return False, f"oracle point {p.coeffs} not reported by finder"
    else:
        for p in oracle_points:
            if _distance_to_report(p, basis, pset) > agree_tol:
                return False, f"oracle point {p.coeffs} off the reported variety"
    return True, ""


def suite_multipartite(samples: int, seed: int, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Lemma fuzzing, fixture cross-cut checks and the no-bipartite-class law."""
    from .fixtures import MULTIPARTITE_FIXTURES

    out = {
        "name": "multipartite",
        "lemma_trials": 0,
        "fixture_checks": {},
        "instance_trials": 0,
        "disagreements": 0,
        "failures": [],
    }
    rng = derived_rng(seed, 29)

    lemma_n = max(50, samples)
    for i in range(lemma_n):
        d_a = int(rng.integers(2, 4))
        d_b = int(rng.integers(2, 4))
        pa = DimensionProfile((d_a,))
        pb = DimensionProfile((d_b,))
        if rng.random() < 0.5 and d_a >= 3:
            alphas = [StateVector(haar_vector(rng, d_a), pa) for _ in range(3)]
        else:
            a1 = StateVector(haar_vector(rng, d_a), pa)
            a2 = StateVector(haar_vector(rng, d_a), pa)
            w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            alphas = [a1, a2, StateVector(w[0] * a1.amplitudes + w[1] * a2.amplitudes, pa)]
        b_shared = StateVector(haar_vector(rng, d_b), pb)
        betas = [b_shared, b_shared, StateVector(haar_vector(rng, d_b), pb)]
        out["lemma_trials"] += 1
        if not paired_factors_independent(alphas, betas, tol):
            out["disagreements"] += 1
            out["failures"].append({"lemma_trial": i})

    per_fixture = max(10, samples // 5)
    for name in MULTIPARTITE_FIXTURES:
        basis, tag, result = _fixture_result(name, tol, seed)
        checks = _cross_cut_check(basis, result, per_fixture, rng, tol)
        out["fixture_checks"][name] = checks
        out["disagreements"] += checks["disagreements"]

    inst_n = max(50, samples)
    for i in range(inst_n):
        k = 3 + (i % 2)
        inst = random_multipartite_instance(rng, k)
        res = classify_multipartite_subspace(inst.basis(), tol, seed=seed + i)
        tag = res.tag.value if hasattr(res.tag, "value") else res.tag
        out["instance_trials"] += 1
        if tag not in ("Triangle", "SphericalCone"):
            out["disagreements"] += 1
            out["failures"].append({"instance_trial": i, "tag": tag})
    return out


def _cross_cut_check(
    basis: SubspaceBasis,
    result: MultiClassResult,
    n: int,
    rng: np.random.Generator,
    tol: ToleranceConfig,
) -> dict:
    """Triangle: nontrivial superpositions are NPT across some cut.
    Cone: sampled separable states are PPT across every cut."""
    checks = {"trials": 0, "disagreements": 0}
    products = result.products
    if result.tag == "Triangle":
        for _ in range(n):
            while True:
                w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
                if np.abs(w).min() > 0.1:
                    break
            amp = sum(wi * p.amplitudes for wi, p in zip(w, products))
            rho = StateVector(amp, products[0].profile).projector()
            checks["trials"] += 1
            if min_pt_eigenvalue_all_cuts(rho, tol) >= -tol.psd_tol:
                checks["disagreements"] += 1
    else:
        for _ in range(n):
            rho = _sample_one(result.description, rng)
            checks["trials"] += 1
            if min_pt_eigenvalue_all_cuts(rho, tol) < -tol.psd_tol:
                checks["disagreements"] += 1
    return checks


def run_suite(
    which: str, samples: int, seed: int, tol: ToleranceConfig = DEFAULT_TOL
) -> dict:
    """Run one or all verification suites; report is reproducible per seed."""
    suites = []
    if which in ("classes", "all"):
        suites.append(suite_classes(samples, seed, tol))
    if which in ("oracle", "all"):
        oracle_samples = samples if which == "oracle" else max(10, samples // 10)
        suites.append(suite_oracle(oracle_samples, seed, tol))
    if which in ("multipartite", "all"):
        suites.append(suite_multipartite(samples, seed, tol))
    if not suites:
        raise ValueError(f"unknown suite {which!r}")
    total = sum(s["disagreements"] for s in suites)
    return {
        "suite": which,
        "samples": samples,
        "seed": seed,
        "disagreements": total,
        "suites": {s["name"]: s for s in suites},
    }
