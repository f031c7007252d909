"""Command-line front end: JSON/CSV I/O with deterministic seeds.

Exit codes: 0 success, 2 input/validation error, 3 solver non-convergence.
Outputs are byte-identical across runs with the same configuration.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import paper_suite
from .errors import ConevolError, NoConvergence
from .geometry import (
    build_polytope,
    canonicalize,
    cone_volume_vector,
)
from .inverse import InverseProblem, solve
from .matroid import brute_force_scc, build_pscc, compute_matroid, scc_check
from .planar import detect_trapezoid_labeling, trapezoid_membership
from .typecones import build_system, filter_full_facet_types, sample_type_cones

COMMANDS = (
    "cone-volume",
    "pscc",
    "scc-check",
    "typecones",
    "emit-system",
    "solve-inverse",
    "membership-trapezoid",
    "figure1-data",
    "paper-suite",
)


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: one command plus I/O paths, seed and tolerances."""

    command: str
    input: str | None = None
    output: str | None = None
    seed: int = 0
    tol_incidence: float = 1e-9
    tol_residual: float = 1e-10
    starts: int = 20
    format: str | None = None
    gamma: str | None = None
    labeling: str | None = None
    trials: int = 200
    samples: int = 2000
    smtlib: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")


class InputError(Exception):
    pass


def _load_input(path):
    if path is None:
        raise InputError("this command requires --input")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(
            f"malformed JSON in {path}: {err.msg} at line {err.lineno} "
            f"column {err.colno}"
        ) from err


def _geometry_from(data, *, need_b=True):
    for key in ("n", "normals") + (("b",) if need_b else ()):
        if key not in data:
            raise InputError(f"input is missing the {key!r} field")
    normals = np.asarray(data["normals"], dtype=float)
    if normals.ndim != 2 or normals.shape[1] != int(data["n"]):
        raise InputError("normals must be a list of m vectors of length n")
    b = np.asarray(data.get("b", np.ones(normals.shape[0])), dtype=float)
    U, b = canonicalize(normals.T, b)
    return U, b


def _gamma_from(data, config, m):
    raw = None
    if config.gamma is not None:
        try:
            raw = json.loads(config.gamma)
        except json.JSONDecodeError as err:
            raise InputError(f"--gamma is not valid JSON: {err.msg}") from err
    elif "gamma" in data:
        raw = data["gamma"]
    if raw is None:
        raise InputError("provide gamma via --gamma or the input file")
    gamma = np.asarray(raw, dtype=float)
    if gamma.shape != (m,):
        raise InputError(f"gamma must have length {m}")
    return gamma


def _round(x):
    if isinstance(x, float):
        return float(f"{x:.12g}")
    return x


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return _round(float(obj))
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    return obj


def _emit(config, payload, *, text=None):
    if text is None:
        text = json.dumps(_jsonify(payload), indent=2) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_cone_volume(config):
    data = _load_input(config.input)
    U, b = _geometry_from(data)
    P = build_polytope(U, b, tol=config.tol_incidence)
    gamma = cone_volume_vector(P)
    _emit(config, {
        "n": U.n,
        "m": U.m,
        "normals": U.columns.T,
        "b": P.b,
        "vertices": P.vertices,
        "facet_incidence": list(P.facet_incidence),
        "facet_measures": P.facet_measures,
        "volume": P.volume,
        "gamma": gamma.gamma,
        "gamma_total": gamma.total,
    })
    return 0


def _matroid_payload(U):
    md = compute_matroid(U)
    return md, {
        "bases": [list(B) for B in md.bases],
        "flats": [{"indices": list(S), "rank": r} for S, r in md.flats],
        "separators": [list(S) for S in md.separators],
        "partition": [list(S) for S in md.partition],
        "d": md.d,
    }


def _cmd_pscc(config):
    data = _load_input(config.input)
    U, _ = _geometry_from(data, need_b=False)
    md, payload = _matroid_payload(U)
    scc = build_pscc(U, md)
    payload.update({
        "dim": scc.dim,
        "vrep": scc.vrep,
        "equalities": [{"indices": list(S), "rhs": rhs} for S, rhs in scc.equalities],
        "inequalities": [
            {"indices": list(S), "rhs": rhs} for S, rhs in scc.inequalities
        ],
    })
    _emit(config, payload)
    return 0


def _verdict_payload(v):
    return {
        "status": v.status,
        "flat": list(v.flat) if v.flat is not None else None,
        "violations": [{"kind": k, "flat": list(S)} for k, S in v.violations],
    }


def _cmd_scc_check(config):
    data = _load_input(config.input)
    U, _ = _geometry_from(data, need_b=False)
    gamma = _gamma_from(data, config, U.m)
    md, payload = _matroid_payload(U)
    verdict = scc_check(U, gamma, matroid=md)
    payload["verdict"] = _verdict_payload(verdict)
    payload["brute_force_verdict"] = _verdict_payload(brute_force_scc(U, gamma))
    _emit(config, payload)
    return 0


def _cmd_typecones(config):
    data = _load_input(config.input)
    U, _ = _geometry_from(data)
    discovered = sample_type_cones(U, trials=config.trials, seed=config.seed)
    full = {tid for tid, _ in filter_full_facet_types(U, discovered)}
    _emit(config, {
        "trials": config.trials,
        "seed": config.seed,
        "count": len(discovered),
        "coverage": f"at least {len(discovered)} types",
        "types": [
            {"type_id": tid, "representative_b": b, "full_facets": tid in full}
            for tid, b in discovered
        ],
    })
    return 0


def _smtlib_text(system):
    def poly_text(p):
        if not p.terms:
            return "0"
        bits = []
        for e, c in p.sorted_terms():
            mono = " ".join(
                " ".join([f"b{i + 1}"] * k) for i, k in enumerate(e) if k
            )
            bits.append(f"(* {c:.12g} {mono})" if mono else f"{c:.12g}")
        return bits[0] if len(bits) == 1 else "(+ " + " ".join(bits) + ")"

    lines = [f"; type {system.type_id}"]
    lines += [f"(declare-const b{i + 1} Real)" for i in range(system.m)]
    lines += [f"(declare-const g{i + 1} Real)" for i in range(system.m)]
    for row in system.cone_rows:
        lines.append("(assert (> " + poly_text(_row_poly(row)) + " 0))")
    lines.append(f"(assert (= {poly_text(system.volume_poly)} 1))")
    for i, p in enumerate(system.coupling):
        lines.append(f"(assert (= g{i + 1} {poly_text(p)}))")
    return "\n".join(lines) + "\n"


def _row_poly(row):
    from .polynomials import Polynomial

    return Polynomial.linear(row)


def _cmd_emit_system(config):
    data = _load_input(config.input)
    U, b = _geometry_from(data)
    system = build_system(U, b, seed=config.seed)
    if config.smtlib:
        _emit(config, None, text=_smtlib_text(system))
        return 0
    _emit(config, {
        "type_id": system.type_id,
        "n": system.n,
        "m": system.m,
        "sample_b": system.sample_b,
        "cone_rows": system.cone_rows,
        "volume_poly": system.volume_poly.to_json(),
        "facet_polys": [p.to_json() for p in system.facet_polys],
        "coupling": [
            {"gamma_index": i, "poly": p.to_json()}
            for i, p in enumerate(system.coupling)
        ],
    })
    return 0


def _cmd_solve_inverse(config):
    data = _load_input(config.input)
    U, _ = _geometry_from(data, need_b=False)
    gamma = _gamma_from(data, config, U.m)
    family = solve(
        InverseProblem(U=U, target=gamma),
        multistarts=config.starts,
        seed=config.seed,
        residual_tol=config.tol_residual,
    )
    _emit(config, {
        "seed": config.seed,
        "starts": config.starts,
        "support": list(family.support),
        "expected_defect": family.expected_defect,
        "solutions": list(family.solutions),
        "residuals": list(family.residuals),
        "rank_defects": list(family.rank_defects),
    })
    return 0


def _cmd_membership_trapezoid(config):
    data = _load_input(config.input)
    U, _ = _geometry_from(data, need_b=False)
    gamma = _gamma_from(data, config, U.m)
    if config.labeling is not None:
        labeling = tuple(json.loads(config.labeling))
    elif "labeling" in data:
        labeling = tuple(data["labeling"])
    else:
        labeling = detect_trapezoid_labeling(U)
    member = trapezoid_membership(gamma, labeling)
    _emit(config, {
        "gamma": gamma,
        "labeling": list(labeling),
        "member": bool(member),
    })
    return 0


def default_trapezoid():
    s2 = float(np.sqrt(2.0))
    return np.array([
        [0.0, 1.0],
        [1.0 / s2, 1.0 / s2],
        [0.0, -1.0],
        [-1.0 / s2, 1.0 / s2],
    ]).T


def _cmd_figure1_data(config):
    if config.input is not None:
        U, _ = _geometry_from(_load_input(config.input), need_b=False)
        labeling = detect_trapezoid_labeling(U)
    else:
        labeling = (0, 1, 2, 3)
    rng = np.random.default_rng(config.seed)
    rows = []
    for _ in range(config.samples):
        gamma = rng.dirichlet(np.ones(4))
        g = gamma[list(labeling)]
        if not trapezoid_membership(gamma, labeling):
            continue
        subset = "A" if g[0] + g[2] < g[1] + g[3] else "B"
        rows.append((g[0], g[1], g[2], subset))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["gamma1", "gamma2", "gamma3", "subset"])
    for g1, g2, g3, subset in rows:
        writer.writerow([f"{g1:.12g}", f"{g2:.12g}", f"{g3:.12g}", subset])
    _emit(config, None, text=buf.getvalue())
    return 0


def _cmd_paper_suite(config):
    results = paper_suite.run_all(seed=config.seed)
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        note = f"  [{r.note}]" if r.note else ""
        lines.append(f"{status}  {r.name:<{width}}  {r.detail}{note}")
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if config.output:
        payload = [
            {"name": r.name, "passed": r.passed, "detail": r.detail, "note": r.note}
            for r in results
        ]
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(_jsonify(payload), indent=2) + "\n")
    return 0 if n_pass == len(results) else 1


_HANDLERS = {
    "cone-volume": _cmd_cone_volume,
    "pscc": _cmd_pscc,
    "scc-check": _cmd_scc_check,
    "typecones": _cmd_typecones,
    "emit-system": _cmd_emit_system,
    "solve-inverse": _cmd_solve_inverse,
    "membership-trapezoid": _cmd_membership_trapezoid,
    "figure1-data": _cmd_figure1_data,
    "paper-suite": _cmd_paper_suite,
}


def run(config: RunConfig) -> int:
    """Execute a parsed configuration; returns the process exit code."""
    try:
        native = "csv" if config.command == "figure1-data" else "json"
        if config.format is not None and config.format != native:
            raise InputError(
                f"{config.command} emits {native}; --format {config.format} "
                "is not available for it"
            )
        return _HANDLERS[config.command](config)
    except (InputError, ValueError) as err:
        sys.stderr.write(json.dumps({"error": "input.invalid", "detail": str(err)}) + "\n")
        return 2
    except NoConvergence as err:
        sys.stderr.write(json.dumps({
            "error": err.code,
            "detail": str(err),
            "best_residual": _round(err.best_residual),
            "best_b": _jsonify(err.best_b) if err.best_b is not None else None,
        }) + "\n")
        return 3
    except ConevolError as err:
        sys.stderr.write(json.dumps({"error": err.code, "detail": str(err)}) + "\n")
        return 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="conevol",
        description="Cone-volume vectors, concentration polytopes, type-cone "
        "systems, and the inverse problem for H-polytopes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol-incidence", type=float, default=1e-9)
        p.add_argument("--tol-residual", type=float, default=1e-10)
        p.add_argument("--starts", type=int, default=20)
        p.add_argument("--format", choices=("json", "csv"), default=None)
        if name in ("scc-check", "solve-inverse", "membership-trapezoid"):
            p.add_argument("--gamma", default=None)
        if name == "membership-trapezoid":
            p.add_argument("--labeling", default=None)
        if name == "typecones":
            p.add_argument("--trials", type=int, default=200)
        if name == "figure1-data":
            p.add_argument("--samples", type=int, default=2000)
        if name == "emit-system":
            p.add_argument("--smtlib", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fields = {
        "command": args.command,
        "input": args.input,
        "output": args.output,
        "seed": args.seed,
        "tol_incidence": args.tol_incidence,
        "tol_residual": args.tol_residual,
        "starts": args.starts,
        "format": args.format,
    }
    for opt in ("gamma", "labeling", "trials", "samples", "smtlib"):
        if hasattr(args, opt):
            fields[opt] = getattr(args, opt)
    return run(RunConfig(**fields))


if __name__ == "__main__":
    sys.exit(main())
