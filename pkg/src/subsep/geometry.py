"""Point and mesh datasets for the separable-set geometries.

Each emitter produces plain x, y, z data for external plotting, together
with metadata tying coordinates back to density matrices.  Embedding
conventions (triangle orientation, circle centers, cone apex at (0, 0, 1))
are fixed constants recorded in the metadata; every dataset validates its
defining algebraic constraints to 1e-12 before it is returned or written.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .descriptions import Cone, ProductCurve, Triangle, TwoBalls
from .linalg import StateVector

__all__ = [
    "FigureData",
    "DensityCurveTable",
    "emit_triangle",
    "emit_cone_section",
    "emit_bisphere_projection",
    "emit_product_curve",
    "emit_extreme_density_curve",
    "write_figure",
]

_CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class FigureData:
    """Geometry dataset: labeled 3-d points plus provenance metadata."""

    label: str
    points: np.ndarray
    groups: tuple[str, ...]
    edges: tuple[tuple[int, int], ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if len(self.groups) != len(pts):
            raise ValueError("one group label per point is required")


@dataclass(frozen=True)
class DensityCurveTable:
    """Density matrices along the extreme curve of a product-curve class."""

    label: str
    phis: np.ndarray
    matrices: np.ndarray
    harmonics: dict
    metadata: dict = field(default_factory=dict)


def _amplitudes_to_pairs(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).reshape(-1)]


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _check(label: str, name: str, residual: float) -> float:
    if residual > _CONSTRAINT_TOL:
        raise AssertionError(
            f"{label}: constraint {name} violated by {residual:.3e} (> {_CONSTRAINT_TOL})"
        )
    return float(residual)


def emit_triangle(desc: Triangle, label: str = "triangle") -> FigureData:
    """Equilateral triangle in the z = 0 plane, one vertex per projector.

    The vertices are (1, 0, 0), (-1/2, +sqrt(3)/2, 0), (-1/2, -sqrt(3)/2, 0);
    barycentric coordinates over them map to mixtures of the three product
    projectors recorded in the metadata.
    """
    points = np.array(
        [
            [1.0, 0.0, 0.0],
            [-0.5, np.sqrt(3.0) / 2.0, 0.0],
            [-0.5, -np.sqrt(3.0) / 2.0, 0.0],
        ]
    )
    constraints = {
        "z_equals_0": _check(label, "z=0", float(np.max(np.abs(points[:, 2])))),
        "unit_circumradius": _check(
            label, "x^2+y^2=1", float(np.max(np.abs(np.sum(points**2, axis=1) - 1.0)))
        ),
    }
    metadata = {
        "class": "triangle",
        "vertices": [_amplitudes_to_pairs(s.amplitudes) for s in desc.states],
        "barycentric_map": "a point with barycentric weights (w1, w2, w3) is the "
        "density matrix w1 P1 + w2 P2 + w3 P3 of the vertex projectors",
        "constraints": constraints,
    }
    return FigureData(
        label=label,
        points=points,
        groups=("vertex",) * 3,
        edges=((0, 1), (1, 2), (2, 0)),
        metadata=metadata,
    )


def emit_cone_section(desc: Cone, n: int, label: str = "cone") -> FigureData:
    """Cone over the equatorial disc of the local ball, apex at (0, 0, 1).

    Equator angle theta_j maps to the local state
    (|b1> + exp(i theta) |b2>)/sqrt(2) over the ball's local basis.
    """
    if n < 3:
        raise ValueError("cone section needs n >= 3 equator samples")
    thetas = 2.0 * np.pi * np.arange(n) / n
    equator = np.column_stack([np.cos(thetas), np.sin(thetas), np.zeros(n)])
    points = np.vstack([equator, [0.0, 0.0, 1.0]])
    constraints = {
        "equator_unit_circle": _check(
            label,
            "x^2+y^2=1, z=0",
            float(
                np.max(
                    np.abs(
                        np.concatenate(
                            [equator[:, 0] ** 2 + equator[:, 1] ** 2 - 1.0, equator[:, 2]]
                        )
                    )
                )
            ),
        ),
        "apex_position": _check(label, "apex=(0,0,1)", float(np.max(np.abs(points[-1] - [0, 0, 1])))),
    }
    equator_states = []
    for theta in thetas:
        s = desc.ball.ball_state([1.0 / np.sqrt(2.0), np.exp(1j * theta) / np.sqrt(2.0)])
        equator_states.append(_amplitudes_to_pairs(s.amplitudes))
    metadata = {
        "class": "cone",
        "theta_grid": [float(t) for t in thetas],
        "equator_states": equator_states,
        "apex_state": _amplitudes_to_pairs(desc.apex.amplitudes),
        "constraints": constraints,
    }
    return FigureData(
        label=label,
        points=points,
        groups=("equator",) * n + ("apex",),
        metadata=metadata,
    )


def emit_bisphere_projection(desc: TwoBalls, n: int, label: str = "two_balls") -> FigureData:
    """Two unit circles in orthogonal planes sharing one point.

    Circle 1 lies in the z = 0 plane centered at (1, 0, 0); circle 2 lies in
    the y = 0 plane centered at (-1, 0, 0); they share exactly the origin,
    which represents the intersection product state.
    """
    if n < 3:
        raise ValueError("bisphere projection needs n >= 3 samples per circle")
    thetas = 2.0 * np.pi * np.arange(n) / n
    circle1 = np.column_stack([1.0 + np.cos(thetas + np.pi), np.sin(thetas + np.pi), np.zeros(n)])
    circle2 = np.column_stack([-1.0 + np.cos(thetas), np.zeros(n), np.sin(thetas)])
    points = np.vstack([circle1, circle2])
    res1 = np.max(
        np.abs(
            np.concatenate(
                [(circle1[:, 0] - 1.0) ** 2 + circle1[:, 1] ** 2 - 1.0, circle1[:, 2]]
            )
        )
    )
    res2 = np.max(
        np.abs(
            np.concatenate(
                [(circle2[:, 0] + 1.0) ** 2 + circle2[:, 2] ** 2 - 1.0, circle2[:, 1]]
            )
        )
    )
    shared = np.min(np.linalg.norm(circle1, axis=1)) + np.min(np.linalg.norm(circle2, axis=1))
    constraints = {
        "circle1": _check(label, "(x-1)^2+y^2=1, z=0", float(res1)),
        "circle2": _check(label, "(x+1)^2+z^2=1, y=0", float(res2)),
        "shared_point": _check(label, "both circles pass through (0,0,0)", float(shared)),
    }
    metadata = {
        "class": "two_balls",
        "theta_grid": [float(t) for t in thetas],
        "intersection_state": _amplitudes_to_pairs(desc.intersection.amplitudes),
        "constraints": constraints,
    }
    return FigureData(
        label=label,
        points=points,
        groups=("circle1",) * n + ("circle2",) * n,
        metadata=metadata,
    )


def emit_product_curve(desc: ProductCurve, n: int, label: str = "product_curve") -> FigureData:
    """The closed curve (cos phi, sin phi, cos 2 phi) of extreme points.

    Points satisfy x^2 + y^2 = 1 and z = x^2 - y^2, the boundary case of the
    convex body 2x^2 - 1 <= z <= 1 - 2y^2.
    """
    if n < 4:
        raise ValueError("product curve needs n >= 4 samples")
    phis = 2.0 * np.pi * np.arange(n) / n
    x, y = np.cos(phis), np.sin(phis)
    z = np.cos(2.0 * phis)
    points = np.column_stack([x, y, z])
    constraints = {
        "unit_circle": _check(label, "x^2+y^2=1", float(np.max(np.abs(x**2 + y**2 - 1.0)))),
        "saddle": _check(label, "z=x^2-y^2", float(np.max(np.abs(z - (x**2 - y**2))))),
        "body_lower": _check(
            label, "2x^2-1<=z", float(np.max(np.clip(2 * x**2 - 1.0 - z, 0.0, None)))
        ),
        "body_upper": _check(
            label, "z<=1-2y^2", float(np.max(np.clip(z - (1.0 - 2 * y**2), 0.0, None)))
        ),
    }
    metadata = {
        "class": "product_curve",
        "phi_grid": [float(p) for p in phis],
        "pair_map": _matrix_to_pairs(desc.pair_map.matrix),
        "body_bounds": "2x^2-1 <= z <= 1-2y^2 with equality on the curve",
        "constraints": constraints,
    }
    return FigureData(label=label, points=points, groups=("curve",) * n, metadata=metadata)


def _normal_form_state(phi: float) -> np.ndarray:
    """Subspace coordinates of the paired state at curve angle phi.

    Coordinates are taken in the ordered basis (|11>, |22>, |Psi+>) of the
    symmetric two-qubit subspace.
    """
    return np.array(
        [0.5, 0.5 * np.exp(2j * phi), np.exp(1j * phi) / np.sqrt(2.0)], dtype=complex
    )


def normal_form_harmonics() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fixed matrices (first harmonic, second harmonic, constant term)."""
    a = np.zeros((3, 3), dtype=complex)
    a[2, 0] = 1.0 / (2.0 * np.sqrt(2.0))
    a[1, 2] = 1.0 / (2.0 * np.sqrt(2.0))
    b = np.zeros((3, 3), dtype=complex)
    b[1, 0] = 0.25
    c = np.diag([0.25, 0.25, 0.5]).astype(complex)
    return a, b, c


def emit_extreme_density_curve(
    desc: ProductCurve, n: int, label: str = "extreme_density_curve"
) -> DensityCurveTable:
    """Density matrices of the extreme curve in normal-form coordinates.

    In the normal form (attained by local invertible maps stored on the
    description), the extreme state at angle phi is the equal superposition
    qubit paired with itself; its density matrix decomposes exactly as
    ``C + e^{i phi} A + h.c. + e^{2 i phi} B + h.c.`` with fixed matrices
    A, B, C returned in ``harmonics``.
    """
    if n < 5:
        raise ValueError("harmonic extraction needs n >= 5 samples")
    phis = 2.0 * np.pi * np.arange(n) / n
    mats = np.empty((n, 3, 3), dtype=complex)
    a, b, c = normal_form_harmonics()
    worst = 0.0
    for i, phi in enumerate(phis):
        psi = _normal_form_state(phi)
        rho = np.outer(psi, psi.conj())
        decomposed = (
            c
            + np.exp(1j * phi) * a
            + np.exp(-1j * phi) * a.conj().T
            + np.exp(2j * phi) * b
            + np.exp(-2j * phi) * b.conj().T
        )
        worst = max(worst, float(np.max(np.abs(rho - decomposed))))
        mats[i] = rho
    _check(label, "harmonic decomposition", worst)
    harmonics = {
        "first": _matrix_to_pairs(a),
        "second": _matrix_to_pairs(b),
        "constant": _matrix_to_pairs(c),
    }
    metadata = {
        "class": "product_curve",
        "basis_order": ["|11>", "|22>", "(|12>+|21>)/sqrt(2)"],
        "pair_map": _matrix_to_pairs(desc.pair_map.matrix),
        "constraints": {"harmonic_decomposition": worst},
    }
    return DensityCurveTable(
        label=label, phis=phis, matrices=mats, harmonics=harmonics, metadata=metadata
    )


def write_figure(fig: FigureData | DensityCurveTable, path: str | Path) -> Path:
    """Write a dataset as CSV or JSON, chosen by the file extension."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if isinstance(fig, DensityCurveTable):
                header = ["phi"]
                for r in range(3):
                    for cidx in range(3):
                        header += [f"re_{r}{cidx}", f"im_{r}{cidx}"]
                writer.writerow(header)
                for phi, m in zip(fig.phis, fig.matrices):
                    row = [repr(float(phi))]
                    for r in range(3):
                        for cidx in range(3):
                            row += [repr(float(m[r, cidx].real)), repr(float(m[r, cidx].imag))]
                    writer.writerow(row)
            else:
                writer.writerow(["x", "y", "z", "group"])
                for p, g in zip(fig.points, fig.groups):
                    writer.writerow([repr(float(p[0])), repr(float(p[1])), repr(float(p[2])), g])
        return path
    if path.suffix.lower() == ".json":
        if isinstance(fig, DensityCurveTable):
            payload = {
                "label": fig.label,
                "phis": [float(p) for p in fig.phis],
                "matrices": [_matrix_to_pairs(m) for m in fig.matrices],
                "harmonics": fig.harmonics,
                "metadata": fig.metadata,
            }
        else:
            payload = {
                "label": fig.label,
                "points": [[float(x) for x in p] for p in fig.points],
                "groups": list(fig.groups),
                "edges": [list(e) for e in fig.edges],
                "metadata": fig.metadata,
            }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path
    raise ValueError(f"unsupported output extension {path.suffix!r} (use .csv or .json)")
