"""Command-line front end.

One JSON problem format serves every subcommand::

    {
      "n": 2,
      "objective":   {"A": [[...]], "a": [...], "c": 0.0},
      "constraints": [{"B": [[...]], "b": [...], "d": 0.0}, ...],
      "bounds":      {"l": -1.0, "u": 1.0},     # interval problems only
      "affine_only": true                        # optional marker
    }

Matrices are row-major nested arrays.  Reports are a single JSON object
on standard output with a stable key set (keys inapplicable to the
subcommand are null).  Exit codes: 0 computed, 2 infeasible input or
violated precondition, 3 parse error (the offending field is named).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import gtrs, linalg, numrange, oracles, qp1eqc, sconditions, slemma
from .errors import EqSlemmaError
from .quadratics import (
    DEFAULT_SEED,
    GtrsProblem,
    NumrangeProblem,
    QuadForm,
    Qp1eqcProblem,
)


class SchemaError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _require(doc: dict, field: str):
    if field not in doc:
        raise SchemaError(field, "missing required field")
    return doc[field]


def _as_matrix(value, field: str, n: int) -> np.ndarray:
    try:
        M = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(field, "not a numeric matrix") from None
    if M.shape != (n, n):
        raise SchemaError(field, f"expected shape {(n, n)}, got {M.shape}")
    return M

def _as_vector(value, field: str, n: int) -> np.ndarray:
    try:
        v = np.asarray(value, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise SchemaError(field, "not a numeric vector") from None
    if v.shape != (n,):
        raise SchemaError(field, f"expected length {n}, got {v.shape[0]}")
    return v


def _as_number(value, field: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SchemaError(field, "not a number")
    return float(value)


def _quadform(doc: dict, field: str, n: int, keys=("A", "a", "c")) -> QuadForm:
    if not isinstance(doc, dict):
        raise SchemaError(field, "expected an object")
    kA, ka, kc = keys
    A = _as_matrix(_require(doc, kA), f"{field}.{kA}", n)
    a = _as_vector(_require(doc, ka), f"{field}.{ka}", n)
    c = _as_number(_require(doc, kc), f"{field}.{kc}")
    try:
        return QuadForm(A, a, c)
    except ValueError as exc:
        raise SchemaError(field, str(exc)) from None


def load_problem(path: str) -> dict:
    """Parse a problem file into objective/constraints/bounds pieces."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise SchemaError("file", f"cannot open {path!r}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError("file", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("file", "top level must be an object")
    n = _require(doc, "n")
    if not isinstance(n, int) or n < 1:
        raise SchemaError("n", "must be a positive integer")
    objective = _quadform(_require(doc, "objective"), "objective", n)
    raw_cons = _require(doc, "constraints")
    if not isinstance(raw_cons, list) or not raw_cons:
        raise SchemaError("constraints", "must be a nonempty array")
    constraints = [
        _quadform(con, f"constraints[{i}]", n, keys=("B", "b", "d"))
        for i, con in enumerate(raw_cons)
    ]
    bounds = None
    if doc.get("bounds") is not None:
        bdoc = doc["bounds"]
        if not isinstance(bdoc, dict):
            raise SchemaError("bounds", "expected an object")
        bounds = (_as_number(_require(bdoc, "l"), "bounds.l"), _as_number(_require(bdoc, "u"), "bounds.u"))
    return {"n": n, "objective": objective, "constraints": constraints, "bounds": bounds}


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


def _report(tol, seed, **kw) -> dict:
    base = {
        "verdict": None,
        "outcome": None,
        "certificate": None,
        "counterexample": None,
        "branch": None,
        "value": None,
        "x_star": None,
        "mu_star": None,
        "diagnostics": {"tolerances": {"tol": tol, "default_sign_coeff": linalg.SIGN_TOL_COEFF},
                        "pencil_interval": None,
                        "seed": seed},
    }
    diag_extra = kw.pop("diagnostics", None)
    base.update(kw)
    if diag_extra:
        base["diagnostics"].update(diag_extra)
    return _jsonable(base)


def _interval_to_json(interval):
    if interval is None or interval.empty:
        return None
    return [interval.lo, interval.hi]


def _single_constraint(problem: dict) -> QuadForm:
    if len(problem["constraints"]) != 1:
        raise SchemaError("constraints", "exactly one constraint is required here")
    return problem["constraints"][0]


def _cmd_check(args, problem) -> dict:
    f = problem["objective"]
    if args.mode == "interval":
        h = _single_constraint(problem)
        if problem["bounds"] is None:
            raise SchemaError("bounds", "interval mode requires bounds")
        l, u = problem["bounds"]
        verdict = gtrs.interval_slemma(f, h, l, u)
        return _report(
            args.tol,
            args.seed,
            verdict={
                "equivalence_holds": verdict.equivalence_holds,
                "i1_true": verdict.i1_true,
                "i2_true": verdict.i2_true,
                "exception_nu": verdict.exception_nu,
            },
            certificate=verdict.mu,
            branch="interval-exception" if verdict.exception_nu is not None else "interval",
            mu_star=verdict.mu,
        )
    h = _single_constraint(problem)
    check = slemma.slemma_equality if args.mode == "equality" else slemma.slemma_inequality
    verdict = check(f, h, seed=args.seed)
    details = {}
    if "exception_matrix" in verdict.details:
        details["exception_matrix"] = verdict.details["exception_matrix"]
    if verdict.details.get("nullspace_match") is not None:
        details["nullspace_match"] = verdict.details["nullspace_match"]
    return _report(
        args.tol,
        args.seed,
        verdict={
            "equivalence_holds": verdict.equivalence_holds,
            "e1_true": verdict.e1_true,
            "e2_true": verdict.e2_true,
            **details,
        },
        certificate=verdict.certificate,
        counterexample=verdict.counterexample,
        branch=verdict.branch,
        mu_star=verdict.certificate,
        diagnostics={
            "pencil_interval": _interval_to_json(
                linalg.pencil_interval(f.A, h.A, tol=args.tol)
            )
        },
    )


def _cmd_solve(args, problem) -> dict:
    f = problem["objective"]
    h = _single_constraint(problem)
    if args.kind == "qp1eqc":
        out = qp1eqc.solve(Qp1eqcProblem(f, h))
        witness = None
        if out.witness is not None:
            witness = {"y0": out.witness.y0, "V": out.witness.V, "scalar": out.witness.scalar}
        return _report(
            args.tol,
            args.seed,
            outcome={"status": out.status, "witness": witness},
            value=out.value,
            x_star=out.x_star,
            mu_star=out.mu_star,
            diagnostics={"pencil_interval": _interval_to_json(out.dual_interval)},
        )
    if problem["bounds"] is None:
        raise SchemaError("bounds", "gtrs requires bounds")
    l, u = problem["bounds"]
    out = gtrs.solve_gtrs(GtrsProblem(f, h, l, u))
    return _report(
        args.tol,
        args.seed,
        outcome={"status": out.status, "source": out.source},
        value=out.value,
        x_star=out.x_star,
        mu_star=out.mu_star,
    )


def _cmd_numrange(args, problem) -> dict:
    f = problem["objective"]
    affines = []
    for i, con in enumerate(problem["constraints"]):
        if np.any(con.A):
            raise SchemaError(f"constraints[{i}].B", "numrange requires affine maps (B = 0)")
        affines.append((con.a, con.c))
    verdict = numrange.classify_convexity(NumrangeProblem(f, affines))
    return _report(
        args.tol,
        args.seed,
        verdict={
            "convex": verdict.convex,
            "case": verdict.case,
            "rank": verdict.r,
            "witness_eig": verdict.witness_eig,
            "vav": verdict.details["vav"],
            "waw": verdict.details["waw"],
            "boundary_warning": verdict.details["boundary_warning"],
        },
        branch=f"numrange-case-{verdict.case}",
    )


def _cmd_scond(args, problem) -> dict:
    f = problem["objective"]
    h = _single_constraint(problem)
    flags = sconditions.all_sconditions(f, h)
    return _report(
        args.tol,
        args.seed,
        verdict={f"condition_{k}": v for k, v in flags.items()},
        branch="sconditions",
    )


def _cmd_oracle(args, problem) -> dict:
    f = problem["objective"]
    h = _single_constraint(problem)
    r1 = oracles.oracle_e1(f, h, samples=args.samples, seed=args.seed)
    grid = np.arange(-args.grid_radius, args.grid_radius + args.grid_step, args.grid_step)
    r2 = oracles.oracle_e2(f, h, grid)
    return _report(
        args.tol,
        args.seed,
        verdict={
            "e1_oracle": r1.status,
            "e1_witness": r1.witness,
            "e1_samples": r1.samples_used,
            "e2_oracle": r2.status,
            "e2_mu": r2.mu,
        },
        counterexample=r1.witness,
        branch="oracle",
    )


_HANDLERS = {
    "check": _cmd_check,
    "solve": _cmd_solve,
    "numrange": _cmd_numrange,
    "scond": _cmd_scond,
    "oracle": _cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqslemma",
        description="Certified quadratic implication checks and one-constraint quadratic solvers",
    )
    parser.add_argument("--tol", type=float, default=None, help="override the sign tolerance")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for sampling fallbacks")
    parser.add_argument("--jobs", type=int, default=1, help="process several files concurrently")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide an implication lemma")
    p_check.add_argument("--mode", choices=["equality", "inequality", "interval"], default="equality")
    p_check.add_argument("files", nargs="+")

    p_solve = sub.add_parser("solve", help="globally solve a constrained quadratic program")
    p_solve.add_argument("kind", choices=["qp1eqc", "gtrs"])
    p_solve.add_argument("files", nargs="+")

    p_num = sub.add_parser("numrange", help="classify joint-image convexity")
    p_num.add_argument("files", nargs="+")

    p_scond = sub.add_parser("scond", help="evaluate the four sufficient conditions")
    p_scond.add_argument("files", nargs="+")

    p_oracle = sub.add_parser("oracle", help="brute-force audits of both statements")
    p_oracle.add_argument("--samples", type=int, default=20000)
    p_oracle.add_argument("--grid-radius", type=float, default=100.0)
    p_oracle.add_argument("--grid-step", type=float, default=0.01)
    p_oracle.add_argument("files", nargs="+")
    return parser


def _run_one(args, path: str) -> tuple[int, dict]:
    try:
        problem = load_problem(path)
        report = _HANDLERS[args.command](args, problem)
        return 0, report
    except SchemaError as exc:
        return 3, {"error": str(exc), "field": exc.field, "file": path}
    except EqSlemmaError as exc:
        return 2, {"error": str(exc), "kind": type(exc).__name__, "file": path}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    files = args.files
    if len(files) == 1:
        code, report = _run_one(args, files[0])
        print(json.dumps(report, indent=2))
        return code
    # Batch mode: one JSON report per line, files are independent.
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda f: _run_one(args, f), files))
    else:
        results = [_run_one(args, f) for f in files]
    worst = 0
    for path, (code, report) in zip(files, results):
        if isinstance(report, dict):
            report = {**report, "file": path}
        print(json.dumps(report))
        worst = max(worst, code)
    return worst


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
