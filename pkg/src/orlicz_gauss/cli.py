"""``orlicz-gauss`` command line.

Exit codes: 0 success, 1 input error, 2 divergence, 3 internal error or a
failed inequality row.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from importlib import resources
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from . import __version__
from .gauss_space import (
    GaussFunction,
    HermiteExpansion,
    SchemaError,
    UnknownBuiltinError,
    function_from_json,
    integrate,
    parse_quadrature,
)

EXIT_OK, EXIT_INPUT, EXIT_DIVERGED, EXIT_INTERNAL = 0, 1, 2, 3
TOOL = "orlicz-gauss"


class InputError(Exception):
    """Bad user input; reported with exit code 1."""


# ---------------------------------------------------------------- output


def jsonable(obj: Any) -> Any:
    """Plain JSON types; non-finite floats become ``"inf"``, ``"-inf"``, ``"nan"``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(jsonable(doc), indent=2, allow_nan=False) + "\n"


def _csv_cell(v: Any) -> str:
    v = jsonable(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(doc: dict, fields: Sequence[str], rows: List[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: {TOOL} {doc['version']}\n")
    buf.write(f"# config: {json.dumps(jsonable(doc['config']), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_csv_cell(r.get(f)) for f in fields])
    return buf.getvalue()


def document(command: str, config: dict, result: Any) -> dict:
    return {"tool": TOOL, "version": __version__, "command": command, "config": config, "result": result}


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- inputs


def _resolve(path: Optional[str]) -> Optional[str]:
    return os.path.abspath(path) if path else None


def load_json(path: str, what: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON in {path}: {exc}") from None


def load_function(path: str, what: str = "f") -> GaussFunction:
    return function_from_json(load_json(path, what), what)


def quad_for(spec: str, dim: int, seed: int):
    parts = spec.split(":")
    if parts[0] == "mc" and len(parts) == 2:
        spec = f"{spec}:{seed}"
    try:
        return parse_quadrature(spec, dim)
    except (ValueError, KeyError) as exc:
        raise InputError(f"--quad: {exc}") from None


def _parse_t(text: str) -> float:
    t = float(text)
    if math.isnan(t) or t < 0:
        raise argparse.ArgumentTypeError("t must be a non-negative number or inf")
    return t


def load_points(path: str, dim: int) -> np.ndarray:
    raw = load_json(path, "eval-at")
    if isinstance(raw, dict):
        raw = raw.get("points")
    try:
        pts = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise InputError("eval-at: expected a list of points") from None
    if pts.ndim == 1 and dim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise InputError(f"eval-at: expected points of dimension {dim}")
    return pts


def load_target(path: str, what: str):
    """Density file: ``{"u": fn}``, ``{"density": fn}``, ``{"samples": [...]}``
    or a bare function JSON read as ``u``. Returns ``(kind, object)``."""
    raw = load_json(path, what)
    if isinstance(raw, dict) and "samples" in raw:
        try:
            pts = np.asarray(raw["samples"], dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"{what}.samples: expected a list of points") from None
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        return "samples", pts
    if isinstance(raw, dict) and "density" in raw:
        return "density", function_from_json(raw["density"], f"{what}.density")
    if isinstance(raw, dict) and "u" in raw:
        return "u", function_from_json(raw["u"], f"{what}.u")
    return "u", function_from_json(raw, what)


def load_basis(path: str) -> List[GaussFunction]:
    raw = load_json(path, "basis")
    if isinstance(raw, dict):
        raw = raw.get("basis")
    if not isinstance(raw, list) or not raw:
        raise InputError("basis: expected a non-empty list of functions")
    fs = [function_from_json(b, f"basis[{k}]") for k, b in enumerate(raw)]
    if len({f.dim for f in fs}) != 1:
        raise InputError("basis: functions of different dimension")
    return fs


def _density(kind: str, obj, rule):
    from .info_geom import from_density, normalize

    if kind == "density":
        return from_density(obj, rule)
    return normalize(obj, rule)


# ---------------------------------------------------------------- commands


def cmd_norm(args) -> int:
    from .orlicz_norms import dual_norm, luxemburg_norm, squared_space_norm
    from .young import parse_young

    f = load_function(args.f)
    try:
        phi = parse_young(args.phi)
    except ValueError as exc:
        raise InputError(f"--phi: {exc}") from None
    rule = quad_for(args.quad, f.dim, args.seed)
    config = {"f": _resolve(args.f), "phi": phi.name, "kind": args.kind, "quad": rule.spec(),
              "tol": args.tol, "seed": args.seed, "format": args.format}
    fn = {"luxemburg": luxemburg_norm, "dual": dual_norm, "squared": squared_space_norm}[args.kind]
    res = fn(f, phi, rule, args.tol)
    doc = document("norm", config, res.to_dict())
    _write(args, doc, list(res.to_dict()), [res.to_dict()])
    return EXIT_DIVERGED if res.diverged else EXIT_OK


def _shipped_catalog() -> dict:
    return json.loads(resources.files("orlicz_gauss").joinpath("data/catalog.json").read_text(encoding="utf-8"))


def cmd_verify(args) -> int:
    from .inequalities import CSV_FIELDS, SuiteConfig, load_catalog, run_suite, thread_count

    raw = load_json(args.catalog, "catalog") if args.catalog else _shipped_catalog()
    catalog = load_catalog(raw)
    quad = f"{args.quad}:{args.seed}" if args.quad.startswith("mc:") and args.quad.count(":") == 1 else args.quad
    quad_for(quad, 1, args.seed)  # fail early on a bad --quad
    cfg = SuiteConfig(quad=quad, tol=args.tol, threads=thread_count(args.threads))
    report = run_suite(catalog, cfg)
    # the worker count does not change results, so it stays out of the config
    config = {"catalog": _resolve(args.catalog) or "<shipped>", **cfg.to_dict(), "seed": args.seed,
              "format": args.format}
    doc = document("verify", config, report.to_dict())
    _write(args, doc, CSV_FIELDS, [r.to_dict() for r in report.rows])
    if args.out:
        sys.stdout.write(json.dumps(report.summary(), sort_keys=True) + "\n")
    return EXIT_OK if report.ok else EXIT_INTERNAL


def cmd_semigroup(args) -> int:
    from .ou_semigroup import apply, default_inner_rule, l2_contraction

    f = load_function(args.f)
    pts = load_points(args.eval_at, f.dim)
    inner = quad_for(args.inner_quad, f.dim, args.seed) if args.inner_quad else default_inner_rule(f.dim)
    rule = quad_for(args.quad, f.dim, args.seed)
    pt = apply(f, args.t, inner)
    values = np.asarray(pt._value(pts), dtype=float)
    mean_f = integrate(f, rule)
    mean_pt = integrate(pt, rule)
    l2 = l2_contraction(f, args.t, rule, inner) if math.isfinite(args.t) else (0.0, 0.0)
    route = "hermite" if isinstance(f, HermiteExpansion) else "mehler"
    config = {"f": _resolve(args.f), "t": args.t, "eval_at": _resolve(args.eval_at), "quad": rule.spec(),
              "inner_quad": inner.spec(), "seed": args.seed, "format": args.format}
    result = {
        "route": route,
        "points": pts.tolist(),
        "values": values.tolist(),
        "diagnostics": {
            "mean_f": mean_f,
            "mean_Ptf": mean_pt,
            "mean_invariance_error": abs(mean_pt - mean_f),
            "l2_centered_Ptf": l2[0],
            "l2_contraction_bound": l2[1],
            "l2_contraction_holds": bool(l2[0] <= l2[1] + 1e-8),
        },
    }
    rows = [{"point": p, "value": v} for p, v in zip(result["points"], result["values"])]
    _write(args, document("semigroup", config, result), ["point", "value"], rows)
    return EXIT_OK


def cmd_score_fit(args) -> int:
    from .info_geom import score_matching_fit

    kind, tgt = load_target(args.target, "target")
    basis = load_basis(args.basis)
    dim = basis[0].dim
    rule = quad_for(args.quad, dim, args.seed)
    if kind == "samples":
        if args.mode != "empirical":
            raise InputError("target: a sample set needs --mode empirical")
        target = tgt
    else:
        if tgt.dim != dim:
            raise InputError("target and basis dimensions differ")
        target = _density(kind, tgt, rule)
    res = score_matching_fit(target, basis, rule, mode=args.mode, samples=args.samples, seed=args.seed,
                             pseudo=args.pseudo)
    config = {"target": _resolve(args.target), "basis": _resolve(args.basis), "mode": args.mode,
              "samples": args.samples if args.mode == "empirical" else None, "quad": rule.spec(),
              "seed": args.seed, "pseudo": args.pseudo, "format": args.format}
    d = res.to_dict()
    se = d["std_errors"] or [None] * len(d["coefficients"])
    rows = [{"index": k, "coefficient": c, "std_error": s} for k, (c, s) in enumerate(zip(d["coefficients"], se))]
    _write(args, document("ig score-fit", config, d), ["index", "coefficient", "std_error"], rows)
    return EXIT_OK


def cmd_otto(args) -> int:
    from .info_geom import otto_inner

    kind, p = load_target(args.p, "p")
    if kind == "samples":
        raise InputError("p: expected a density, not samples")
    f, g = load_function(args.f, "f"), load_function(args.g, "g")
    if not (p.dim == f.dim == g.dim):
        raise InputError("p, f and g must share a dimension")
    rule = quad_for(args.quad, p.dim, args.seed)
    res = otto_inner(_density(kind, p, rule), f, g, rule, auto_center=not args.no_center)
    config = {"p": _resolve(args.p), "f": _resolve(args.f), "g": _resolve(args.g), "quad": rule.spec(),
              "auto_center": not args.no_center, "seed": args.seed, "format": args.format}
    d = res.to_dict()
    _write(args, document("ig otto", config, d), list(d), [d])
    return EXIT_OK if res.agree else EXIT_INTERNAL


def cmd_check_model(args) -> int:
    from .info_geom import maxexp_sufficient_check, score_preconditions

    kind, p = load_target(args.p, "p")
    if kind == "samples":
        raise InputError("p: expected a density, not samples")
    rule = quad_for(args.quad, p.dim, args.seed)
    dens = _density(kind, p, rule)
    pfun = p if kind == "density" else dens.as_function()
    mx = maxexp_sufficient_check(pfun, rule)
    pre = score_preconditions(dens, rule, args.tol)
    config = {"p": _resolve(args.p), "quad": rule.spec(), "tol": args.tol, "seed": args.seed, "format": args.format}
    result = {"K": dens.K, "maxexp": mx.to_dict(), "score_preconditions": pre.to_dict()}
    row = {"K": dens.K, "l2": mx.l2, "inv": mx.inv, "maxexp_holds": mx.holds,
           "grad_sq_cosh_norm": pre.grad_sq_cosh_norm, "delta_grad_cosh_norm": pre.delta_grad_cosh_norm,
           "preconditions_hold": pre.holds}
    _write(args, document("ig check-model", config, result), list(row), [row])
    return EXIT_OK


def _write(args, doc: dict, fields: Sequence[str], rows: List[dict]) -> None:
    text = to_csv(doc, fields, rows) if args.format == "csv" else dumps(doc)
    emit(text, args.out)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo rules and sampling (default 0)")

    p = argparse.ArgumentParser(prog=TOOL, description="Orlicz norms and Poincare-type inequalities on the Gaussian space.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    n = sub.add_parser("norm", parents=[common], help="Luxemburg, dual or squared-space norm of a function")
    n.add_argument("--f", required=True, help="function JSON file")
    n.add_argument("--phi", required=True, help='Young function, e.g. "cosh-1", "power:2", "sq(cosh-1)"')
    n.add_argument("--kind", choices=("luxemburg", "dual", "squared"), default="luxemburg")
    n.add_argument("--quad", default="gh:64")
    n.add_argument("--tol", type=float, default=1e-10)
    n.set_defaults(func=cmd_norm)

    v = sub.add_parser("verify", parents=[common], help="run the inequality suite over a catalog")
    v.add_argument("--catalog", help="catalog JSON file (default: the shipped catalog)")
    v.add_argument("--quad", default="gh:64")
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--threads", type=int, default=None, help="worker threads (capped by ORLICZ_GAUSS_THREADS)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("semigroup", parents=[common], help="evaluate P_t f at points")
    s.add_argument("--f", required=True)
    s.add_argument("--t", required=True, type=_parse_t)
    s.add_argument("--eval-at", required=True, dest="eval_at", help="JSON list of points")
    s.add_argument("--quad", default="gh:32", help="outer rule for the invariance diagnostics")
    s.add_argument("--inner-quad", dest="inner_quad", help="Mehler rule (default depends on dimension)")
    s.set_defaults(func=cmd_semigroup)

    ig = sub.add_parser("ig", help="information-geometry tools")
    igs = ig.add_subparsers(dest="ig_command", required=True)
    sf = igs.add_parser("score-fit", parents=[common], help="Hyvarinen score matching on a basis")
    sf.add_argument("--target", required=True)
    sf.add_argument("--basis", required=True)
    sf.add_argument("--mode", choices=("exact", "empirical"), default="exact")
    sf.add_argument("--samples", type=int, default=100_000)
    sf.add_argument("--quad", default="gh:64")
    sf.add_argument("--pseudo", action="store_true", help="least-squares solve for a singular Gram matrix")
    sf.set_defaults(func=cmd_score_fit)
    ot = igs.add_parser("otto", parents=[common], help="Otto inner product and its adjoint form")
    ot.add_argument("--p", required=True)
    ot.add_argument("--f", required=True)
    ot.add_argument("--g", required=True)
    ot.add_argument("--quad", default="gh:64")
    ot.add_argument("--no-center", action="store_true", dest="no_center",
                    help="reject f, g that are not centered under p instead of centering them")
    ot.set_defaults(func=cmd_otto)
    cm = igs.add_parser("check-model", parents=[common], help="maximal exponential model and score-matching checks")
    cm.add_argument("--p", required=True)
    cm.add_argument("--quad", default="gh:64")
    cm.add_argument("--tol", type=float, default=1e-10)
    cm.set_defaults(func=cmd_check_model)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    from .info_geom import CenteringError, DivergentNormalizerError, SingularGramError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    handler: Callable = args.func
    try:
        return handler(args)
    except (InputError, SchemaError, UnknownBuiltinError, CenteringError, SingularGramError) as exc:
        msg = exc.args[0] if isinstance(exc, UnknownBuiltinError) else str(exc)
        sys.stderr.write(f"{TOOL}: input error: {msg}\n")
        return EXIT_INPUT
    except DivergentNormalizerError as exc:
        sys.stderr.write(f"{TOOL}: diverged: {exc}\n")
        return EXIT_DIVERGED
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(f"{TOOL}: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
