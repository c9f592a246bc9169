"""Command-line front end with JSON input and JSON/CSV output.

Exit codes: 0 success, 1 input error, 2 solver inconsistency,
3 verification failure.  The environment variable ``SUBSEP_SEED`` provides
the default seed; identical inputs and seed produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from ._validation import complex_to_pairs, parse_state_payload, parse_subspace_payload
from .api import classify_subspace
from .classify import ClassificationResult
from .descriptions import (
    AllStates,
    Cone,
    LocalBall,
    NoSeparable,
    ProductCurve,
    Segment,
    SinglePoint,
    Triangle,
    TwoBalls,
)
from .errors import SolverInconsistencyError, SubsepError
from .geometry import (
    emit_bisphere_projection,
    emit_cone_section,
    emit_extreme_density_curve,
    emit_product_curve,
    emit_triangle,
    write_figure,
)
from .linalg import support_basis
from .multipartite import MultiClassResult
from .oracle import run_suite
from .separability import is_ppt, membership, min_pt_eigenvalue_all_cuts
from .tolerances import DEFAULT_TOL

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3


def _default_seed() -> int:
    return int(os.environ.get("SUBSEP_SEED", "0"))


def _parse_cut(text: str | None):
    if text is None:
        return None
    left = text.split("|")[0]
    return tuple(int(x) for x in left.split(",") if x.strip() != "")


def _state_to_pairs(state) -> list:
    return complex_to_pairs(state.amplitudes)


def _ball_to_dict(ball: LocalBall) -> dict:
    return {
        "kind": ball.kind,
        "free_cut": list(ball.free_cut),
        "fixed_factor": _state_to_pairs(ball.fixed_factor),
        "local_basis": [_state_to_pairs(v) for v in ball.local_basis],
        "ambient_basis": [_state_to_pairs(v) for v in ball.ambient.vectors],
    }


def _description_to_dict(desc) -> dict:
    if isinstance(desc, NoSeparable):
        return {"kind": desc.kind}
    if isinstance(desc, AllStates):
        return {"kind": desc.kind, "basis": [_state_to_pairs(v) for v in desc.basis.vectors]}
    if isinstance(desc, SinglePoint):
        return {"kind": desc.kind, "state": _state_to_pairs(desc.state)}
    if isinstance(desc, (Segment, Triangle)):
        return {"kind": desc.kind, "states": [_state_to_pairs(s) for s in desc.states]}
    if isinstance(desc, LocalBall):
        return _ball_to_dict(desc)
    if isinstance(desc, Cone):
        return {"kind": desc.kind, "apex": _state_to_pairs(desc.apex), "ball": _ball_to_dict(desc.ball)}
    if isinstance(desc, TwoBalls):
        return {
            "kind": desc.kind,
            "ball_a": _ball_to_dict(desc.ball_a),
            "ball_b": _ball_to_dict(desc.ball_b),
            "intersection": _state_to_pairs(desc.intersection),
        }
    if isinstance(desc, ProductCurve):
        return {
            "kind": desc.kind,
            "matrix": complex_to_pairs(desc.pair_map.matrix),
            "domain_frame": [_state_to_pairs(v) for v in desc.pair_map.domain_frame],
            "codomain_frame": [_state_to_pairs(v) for v in desc.pair_map.codomain_frame],
            "cut": list(desc.pair_map.cut),
        }
    raise TypeError(f"cannot serialize description {type(desc).__name__}")


def _result_to_dict(result) -> dict:
    tag = result.tag.value if hasattr(result.tag, "value") else result.tag
    out = {
        "tag": tag,
        "dim_S": result.dim_s,
        "dim_S_sep": result.dim_s_sep,
        "description": _description_to_dict(result.description),
        "warnings": list(result.warnings),
    }
    if isinstance(result, ClassificationResult):
        out["dims"] = None if result.dims is None else list(result.dims)
        out["cut"] = list(result.cut)
        out["products"] = [
            _state_to_pairs(p) for p in result.witnesses.spanning_products
        ]
        out["component"] = result.witnesses.report.kind
    elif isinstance(result, MultiClassResult):
        out["products"] = [_state_to_pairs(p) for p in result.products]
        if result.pattern is not None:
            out["pattern"] = list(result.pattern.kinds())
        if result.free_subsystem is not None:
            out["free_subsystem"] = result.free_subsystem
        if result.cone_data is not None:
            out["cone_data"] = {
                "apex_index": result.cone_data.apex_index,
                "qubit_subsystem": result.cone_data.qubit_subsystem,
                "coinciding_pair": list(result.cone_data.coinciding_pair),
            }
    return out


def _dump(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def cmd_classify(args) -> int:
    data = _load_json(args.input)
    basis, tol, seed, _ = parse_subspace_payload(data)
    if args.tol is not None:
        tol = tol.replace(membership_tol=float(args.tol))
    if args.seed is not None:
        seed = args.seed
    result = classify_subspace(basis, _parse_cut(args.cut), tol, seed)
    _dump(_result_to_dict(result))
    return EXIT_OK


def cmd_check_state(args) -> int:
    data = _load_json(args.input)
    rho, tol, seed = parse_state_payload(data)
    if args.tol is not None:
        tol = tol.replace(membership_tol=float(args.tol))
    if args.seed is not None:
        seed = args.seed
    basis = support_basis(rho, tol)
    cut = _parse_cut(args.cut)
    result = classify_subspace(basis, cut, tol, seed)
    if rho.profile.n_subsystems == 2 or cut is not None:
        ppt_ok, min_eig = is_ppt(rho, cut, tol)
    else:
        min_eig = min_pt_eigenvalue_all_cuts(rho, tol)
        ppt_ok = min_eig >= -tol.psd_tol
    verdict = membership(rho, result.description, tol, carrier=basis)
    payload = {
        "class": _result_to_dict(result),
        "ppt": bool(ppt_ok),
        "min_pt_eig": float(min_eig),
        "membership": bool(verdict.separable),
    }
    if verdict.certificate is not None:
        payload["certificate"] = verdict.certificate
    _dump(payload)
    return EXIT_OK


_EMITTERS = {
    "triangle": lambda desc, n: emit_triangle(desc),
    "cone": emit_cone_section,
    "two_balls": emit_bisphere_projection,
    "product_curve": emit_product_curve,
}


def cmd_emit_geometry(args) -> int:
    if (args.klass is None) == (args.input is None):
        raise ValueError("provide exactly one of --class or --input")
    if args.klass is not None:
        from .fixtures import fixture_for_tag

        _, basis = fixture_for_tag(args.klass)
    else:
        basis, _, _, _ = parse_subspace_payload(_load_json(args.input))
    seed = args.seed if args.seed is not None else _default_seed()
    result = classify_subspace(basis, _parse_cut(args.cut), DEFAULT_TOL, seed)
    desc = result.description
    kind = desc.kind
    if kind not in _EMITTERS:
        print(f"nothing to emit for description {kind!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.table == "densities":
        if kind != "product_curve":
            print("--table densities requires a product-curve class", file=sys.stderr)
            return EXIT_INPUT
        fig = emit_extreme_density_curve(desc, args.samples)
        constraints = fig.metadata["constraints"]
    else:
        fig = _EMITTERS[kind](desc, args.samples)
        constraints = fig.metadata["constraints"]
    path = write_figure(fig, args.out)
    summary = {
        "written": str(path),
        "label": fig.label,
        "constraints": constraints,
        "constraints_pass": True,
    }
    _dump(summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    report = run_suite(args.suite, args.samples, seed)
    _dump(report)
    return EXIT_OK if report["disagreements"] == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subsep",
        description="Product states, separability classes and geometry of "
        "Hilbert subspaces of dimension up to three.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a subspace from a JSON file")
    p.add_argument("--input", required=True, help="subspace JSON file")
    p.add_argument("--cut", default=None, help='bipartite cut, e.g. "0|1" or "0,1|2"')
    p.add_argument("--tol", type=float, default=None, help="membership tolerance override")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check-state", help="separability verdict for a density matrix")
    p.add_argument("--input", required=True, help="state JSON file")
    p.add_argument("--cut", default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_check_state)

    p = sub.add_parser("emit-geometry", help="write figure data for a class")
    p.add_argument("--class", dest="klass", default=None, help="class tag, e.g. C_3x3")
    p.add_argument("--input", default=None, help="subspace JSON file")
    p.add_argument("--cut", default=None)
    p.add_argument("--samples", type=int, default=128)
    p.add_argument("--table", choices=["points", "densities"], default="points")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output path (.csv or .json)")
    p.set_defaults(func=cmd_emit_geometry)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument(
        "--suite", choices=["all", "classes", "oracle", "multipartite"], default="all"
    )
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverInconsistencyError as exc:
        print(f"solver inconsistency: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (SubsepError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
