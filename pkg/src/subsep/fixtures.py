"""Canonical fixture subspaces for every class, shipped as JSON files.

Amplitudes are stored as ``[re, im]`` pairs.  The payloads are generated by
:func:`canonical_payloads` and written once into the packaged ``fixtures/``
directory; the loader reads the shipped files so external tools can consume
the exact same data.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .linalg import SubspaceBasis

__all__ = [
    "fixture_names",
    "load_fixture",
    "fixture_basis",
    "fixture_for_tag",
    "canonical_payloads",
    "BIPARTITE_FIXTURES",
    "MULTIPARTITE_FIXTURES",
]

_S2 = 1.0 / np.sqrt(2.0)


def _pairs(vec) -> list:
    return [[float(np.real(z)), float(np.imag(z))] for z in vec]


def _unit(dim: int, idx: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[idx] = 1.0
    return v


def _ket3(a: int, b: int, c: int) -> np.ndarray:
    return _unit(8, (a << 2) | (b << 1) | c)


def canonical_payloads() -> dict[str, dict]:
    """All 14 bipartite and 3 multipartite canonical fixtures."""
    plus2 = np.array([_S2, _S2], dtype=complex)
    ppp = np.kron(plus2, np.kron(plus2, plus2))
    p11 = np.kron(plus2, np.kron([0.0, 1.0], [0.0, 1.0]))

    def payload(name, dims, vectors, tag, factors=None):
        data = {
            "name": name,
            "dims": list(dims),
            "vectors": [_pairs(v) for v in vectors],
            "expected_tag": tag,
            "seed": 0,
        }
        if factors is not None:
            data["factors"] = [[_pairs(f) for f in row] for row in factors]
        return data

    e4 = [_unit(4, i) for i in range(4)]
    e6 = [_unit(6, i) for i in range(6)]
    e9 = [_unit(9, i) for i in range(9)]
    bell_like_1 = (_unit(6, 0) + _unit(6, 4)) * _S2
    bell_like_2 = (_unit(6, 1) + _unit(6, 5)) * _S2
    sym_cross = (e4[1] + e4[2]) * _S2

    fixtures = {
        "blm_noproduct": payload(
            "blm_noproduct", (2, 3), [bell_like_1, bell_like_2], "BLM_NoProduct"
        ),
        "blm_oneproduct": payload(
            "blm_oneproduct", (2, 2), [e4[0], sym_cross], "BLM_OneProduct"
        ),
        "blm_1x2": payload("blm_1x2", (2, 2), [e4[0], e4[1]], "BLM_1x2"),
        "blm_2x1": payload("blm_2x1", (2, 2), [e4[0], e4[2]], "BLM_2x1"),
        "blm_2x2": payload("blm_2x2", (2, 2), [e4[0], e4[3]], "BLM_2x2"),
        "c1x3": payload("c1x3", (2, 3), [e6[0], e6[1], e6[2]], "C_1x3"),
        "c3x1": payload("c3x1", (3, 2), [e6[0], e6[2], e6[4]], "C_3x1"),
        "c3x3": payload("c3x3", (3, 3), [e9[0], e9[4], e9[8]], "C_3x3"),
        "c2x3_i": payload(
            "c2x3_i", (2, 3), [e6[0], e6[4], (e6[2] + e6[5]) * _S2], "C_2x3_i"
        ),
        "c2x3_ii": payload("c2x3_ii", (2, 3), [e6[0], e6[4], e6[5]], "C_2x3_ii"),
        "c3x2_i": payload(
            "c3x2_i", (3, 2), [e6[0], e6[3], (e6[4] + e6[5]) * _S2], "C_3x2_i"
        ),
        "c3x2_ii": payload("c3x2_ii", (3, 2), [e6[0], e6[3], e6[5]], "C_3x2_ii"),
        "c2x2_i": payload("c2x2_i", (2, 2), [e4[0], e4[2], e4[3]], "C_2x2_i"),
        "sym22": payload("sym22", (2, 2), [e4[0], e4[3], sym_cross], "C_2x2_ii"),
        "multi_triangle_a": payload(
            "multi_triangle_a",
            (2, 2, 2),
            [_ket3(0, 0, 0), _ket3(1, 1, 1), ppp],
            "Triangle",
            factors=[
                [[1, 0], [1, 0], [1, 0]],
                [[0, 1], [0, 1], [0, 1]],
                [plus2, plus2, plus2],
            ],
        ),
        "multi_cone": payload(
            "multi_cone",
            (2, 2, 2),
            [_ket3(0, 0, 0), _ket3(1, 1, 1), p11],
            "SphericalCone",
            factors=[
                [[1, 0], [1, 0], [1, 0]],
                [[0, 1], [0, 1], [0, 1]],
                [plus2, [0, 1], [0, 1]],
            ],
        ),
        "multi_triangle_b": payload(
            "multi_triangle_b",
            (2, 2, 2),
            [_ket3(0, 0, 0), _ket3(1, 1, 0), _ket3(1, 0, 1)],
            "Triangle",
            factors=[
                [[1, 0], [1, 0], [1, 0]],
                [[0, 1], [0, 1], [1, 0]],
                [[0, 1], [1, 0], [0, 1]],
            ],
        ),
    }
    return fixtures


BIPARTITE_FIXTURES = (
    "blm_noproduct",
    "blm_oneproduct",
    "blm_1x2",
    "blm_2x1",
    "blm_2x2",
    "c1x3",
    "c3x1",
    "c3x3",
    "c2x3_i",
    "c2x3_ii",
    "c3x2_i",
    "c3x2_ii",
    "c2x2_i",
    "sym22",
)
MULTIPARTITE_FIXTURES = ("multi_triangle_a", "multi_cone", "multi_triangle_b")


def regenerate(directory: str | Path) -> list[Path]:
    """Write all fixture JSON files into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, data in canonical_payloads().items():
        path = directory / f"{name}.json"
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


def fixture_names() -> tuple[str, ...]:
    return BIPARTITE_FIXTURES + MULTIPARTITE_FIXTURES


def load_fixture(name: str) -> dict:
    """Load a shipped fixture payload by name."""
    ref = resources.files("subsep").joinpath("fixtures").joinpath(f"{name}.json")
    with ref.open() as fh:
        return json.load(fh)


def _pairs_to_complex_vector(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs])


def fixture_basis(name: str) -> tuple[SubspaceBasis, str]:
    """Subspace basis and expected class tag of a fixture."""
    data = load_fixture(name)
    vectors = [_pairs_to_complex_vector(v) for v in data["vectors"]]
    basis = SubspaceBasis.from_vectors(vectors, data["dims"])
    return basis, data["expected_tag"]


def fixture_for_tag(tag: str) -> tuple[str, SubspaceBasis]:
    """First fixture whose expected tag matches."""
    for name in fixture_names():
        data = load_fixture(name)
        if data["expected_tag"] == tag:
            basis, _ = fixture_basis(name)
            return name, basis
    raise KeyError(f"no fixture for tag {tag!r}")
