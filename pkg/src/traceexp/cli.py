"""Command-line interface.

Every command prints a JSON run report on stdout::

    {"command": [...], "parameters": {...}, "outputs": {...},
     "checks": [{"name", "pass", "measured", "tolerance"}, ...], "ok": bool}

Exit codes: 0 success, 2 input error, 3 domain error, 4 internal invariant
violated, 5 a check failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .closed_form import e1, e2, f_closed, laplace_eval, rho_closed, spectral_measure
from .convexity import CERTIFIED, aggregate_verdict, check_exp_convex
from .errors import DomainError, NoConvergence, TraceExpError
from .pauli import HermitianMatrix2
from .reduction import f_canonical, f_direct, reduce
from .rng import SplitMix64, random_grids
from .words import build_rho_N, convergence_table

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3
EXIT_INVARIANT = 4
EXIT_CHECK = 5

RESIDUAL_T = [float(t) for t in range(-4, 5)]
VALUE_FLAGS = {"--t-range", "--t", "--alpha", "--beta", "--lo", "--hi"}


class InputError(Exception):
    """Malformed user input (bad file, bad schema, unwritable path)."""


class InvariantViolation(Exception):
    pass


def _check(name: str, passed: bool, measured, tolerance) -> dict:
    return {"name": name, "pass": bool(passed), "measured": measured, "tolerance": tolerance}


def load_matrix(path: str) -> HermitianMatrix2:
    """Read a MatrixInput JSON file: ``{"a11": x, "a22": y, "a12": [re, im]}``."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(raw, dict):
        raise InputError(f"{path}: expected a JSON object with fields a11, a22, a12")
    values = {}
    for key in ("a11", "a22"):
        if key not in raw:
            raise InputError(f"{path}: missing field '{key}'")
        if not isinstance(raw[key], (int, float)) or isinstance(raw[key], bool):
            raise InputError(f"{path}: field '{key}' must be a number")
        values[key] = float(raw[key])
    a12 = raw.get("a12")
    if a12 is None:
        raise InputError(f"{path}: missing field 'a12'")
    if (not isinstance(a12, list) or len(a12) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in a12)):
        raise InputError(f"{path}: field 'a12' must be a [re, im] pair of numbers")
    return HermitianMatrix2(values["a11"], values["a22"], complex(a12[0], a12[1]))


def parse_range(text: str):
    """``lo:hi:count`` -> ``count`` evenly spaced points including both ends."""
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}") from exc
    if count < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    if count == 1:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count - 1)] + [hi]


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"{path}: cannot write ({exc.strerror})") from exc


def _write_json(path: str, obj) -> None:
    _write_text(path, json.dumps(obj, indent=2) + "\n")


def _write_csv(path: str, header, rows) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise InputError(f"{path}: cannot write ({exc.strerror})") from exc


def _g12(x: float) -> str:
    return format(x, ".12g")


# -- commands -----------------------------------------------------------------

def cmd_reduce(args) -> dict:
    a, b = load_matrix(args.matrix_a), load_matrix(args.matrix_b)
    dec = reduce(a, b)
    worst = max(abs(f_canonical(dec, t) - f_direct(a, b, t)) / f_direct(a, b, t) for t in RESIDUAL_T)
    scale = max(1.0, dec.alpha, dec.beta) ** 2
    tr_worst = max(dec.trace_residuals()) / scale
    out = dec.as_dict()
    if args.json:
        _write_json(args.json, out)
    return {
        "parameters": {"matrix_a": args.matrix_a, "matrix_b": args.matrix_b},
        "outputs": {"decomposition": out, "residual_t": RESIDUAL_T},
        "checks": [
            _check("round_trip_relative_residual", worst <= 1e-10, worst, 1e-10),
            _check("traceless_conditions", tr_worst <= 1e-12, tr_worst, 1e-12),
        ],
    }


def cmd_measure_approx(args) -> dict:
    if args.n < 2:
        raise DomainError(f"--n must be >= 2, got {args.n}")
    m = build_rho_N(args.n, args.beta)
    mass = m.total_mass()
    bound = math.exp(args.beta)
    within = mass < bound if args.beta > 0 else mass <= bound
    if not within or (m.weights < 0).any():
        raise InvariantViolation(f"mass {mass!r} violates the bound e^beta = {bound!r}")
    data = m.as_dict()
    if args.json:
        _write_json(args.json, data)
    if args.csv:
        _write_csv(args.csv, ["s", "mu", "weight"],
                   [[a["s"], _g12(a["mu"]), _g12(a["weight"])] for a in data["atoms"]])
    return {
        "parameters": {"kind": "approx", "n": args.n, "beta": args.beta},
        "outputs": {"atoms": len(m), "mass": mass, "measure": data if not args.json else args.json},
        "checks": [_check("mass_below_exp_beta", within, mass, bound)],
    }


def cmd_measure_exact(args) -> dict:
    m = rho_closed(args.beta)
    mass = m.mass()
    target = math.cosh(args.beta)
    data = m.as_dict(args.grid_points)
    if args.json:
        _write_json(args.json, data)
    if args.csv:
        _write_csv(args.csv, ["mu", "density"], [[_g12(x), _g12(d)] for x, d in data["density_grid"]])
    err = abs(mass - target)
    return {
        "parameters": {"kind": "exact", "beta": args.beta, "grid_points": args.grid_points},
        "outputs": {"mass": mass, "atom_weight_at_one": m.atom_weight_at_one,
                    "measure": args.json if args.json else {k: v for k, v in data.items() if k != "density_grid"}},
        "checks": [
            _check("mass_equals_cosh_beta", err <= 1e-9, err, 1e-9),
            _check("mass_at_most_exp_beta", mass <= math.exp(args.beta), mass, math.exp(args.beta)),
        ],
    }


def cmd_measure_spectral(args) -> dict:
    a, b = load_matrix(args.matrix_a), load_matrix(args.matrix_b)
    sm = spectral_measure(a, b)
    data = sm.as_dict(args.grid_points)
    if args.json:
        _write_json(args.json, data)
    if args.csv:
        _write_csv(args.csv, ["nu", "density"], [[_g12(x), _g12(d)] for x, d in data["density_grid"]])
    f0 = f_direct(a, b, 0.0)
    err = abs(data["mass"] - f0) / f0
    return {
        "parameters": {"kind": "spectral", "matrix_a": args.matrix_a, "matrix_b": args.matrix_b,
                       "grid_points": args.grid_points},
        "outputs": {"support": data["support"], "atoms": data["atoms"], "mass": data["mass"]},
        "checks": [_check("mass_equals_f_at_zero", err <= 1e-9, err, 1e-9)],
    }


def cmd_verify_convergence(args) -> dict:
    table = convergence_table(args.alpha, args.beta, args.t, args.n_list)
    rows, checks = [], []
    for i, (n, err) in enumerate(table):
        ratio = None
        if i and table[i - 1][0] * 2 == n and err > 0:
            ratio = table[i - 1][1] / err
        rows.append({"n": n, "error": err, "ratio": ratio})
    print(f"{'n':>8} {'error':>14} {'ratio':>8}", file=sys.stderr)
    for r in rows:
        ratio = "" if r["ratio"] is None else f"{r['ratio']:.4f}"
        print(f"{r['n']:>8} {r['error']:>14.6e} {ratio:>8}", file=sys.stderr)
    errors = [e for _, e in table]
    if max(errors) <= 1e-13:
        checks.append(_check("exact_at_every_n", True, max(errors), 1e-13))
    else:
        jitter_ok = all(b <= 1.1 * a for a, b in zip(errors, errors[1:]))
        checks.append(_check("monotone_decrease_10pct", jitter_ok, errors, 1.1))
        ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
        checks.append(_check("first_order_ratio", bool(ratios) and all(1.7 <= q <= 2.3 for q in ratios),
                             ratios, [1.7, 2.3]))
    return {
        "parameters": {"alpha": args.alpha, "beta": args.beta, "t": args.t, "n_list": args.n_list},
        "outputs": {"table": rows},
        "checks": checks,
    }


def cmd_verify_representation(args) -> dict:
    rho = rho_closed(args.beta)
    worst_e1 = worst_e2 = worst_f = 0.0
    for t in args.t_range:
        x = args.alpha * t
        l1, l2 = laplace_eval(rho, x, 1), laplace_eval(rho, x, -1)
        worst_e1 = max(worst_e1, abs(l1 - e1(x, args.beta)))
        worst_e2 = max(worst_e2, abs(l2 - e2(x, args.beta)))
        worst_f = max(worst_f, abs(l1 + l2 - f_closed(args.alpha, args.beta, t)))
    tol = 1e-8
    return {
        "parameters": {"alpha": args.alpha, "beta": args.beta, "t_range": args.t_range},
        "outputs": {"max_abs_residual": max(worst_e1, worst_e2, worst_f)},
        "checks": [
            _check("laplace_matches_e1", worst_e1 < tol, worst_e1, tol),
            _check("laplace_matches_e2", worst_e2 < tol, worst_e2, tol),
            _check("laplace_matches_f_closed", worst_f < tol, worst_f, tol),
        ],
    }


def cmd_verify_convexity(args) -> dict:
    a, b = load_matrix(args.matrix_a), load_matrix(args.matrix_b)
    grids = random_grids(SplitMix64(args.seed), args.grids, max_size=args.max_size,
                         lo=args.lo, hi=args.hi)
    reports = check_exp_convex(lambda t: f_direct(a, b, t), grids)
    verdict = aggregate_verdict(reports)
    worst = min(r.min_eigenvalue / r.scale for r in reports)
    return {
        "parameters": {"matrix_a": args.matrix_a, "matrix_b": args.matrix_b, "grids": args.grids,
                       "seed": args.seed, "max_size": args.max_size, "lo": args.lo, "hi": args.hi},
        "outputs": {"verdict": verdict, "reports": [r.as_dict() for r in reports]},
        "checks": [_check("gram_psd_on_all_grids", verdict == CERTIFIED, worst, -1e-9)],
    }


def cmd_sample(args) -> dict:
    rows = []
    for t in args.t_range:
        x = args.alpha * t
        rows.append([_g12(t), _g12(f_closed(args.alpha, args.beta, t)),
                     _g12(e1(x, args.beta)), _g12(e2(x, args.beta))])
    _write_csv(args.out, ["t", "f", "e1", "e2"], rows)
    return {
        "parameters": {"alpha": args.alpha, "beta": args.beta, "t_range": args.t_range},
        "outputs": {"csv": args.out, "rows": len(rows)},
        "checks": [],
    }


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="traceexp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="canonical decomposition of a Hermitian pair")
    r.add_argument("--matrix-a", required=True)
    r.add_argument("--matrix-b", required=True)
    r.add_argument("--json", help="also write the decomposition to this file")
    r.set_defaults(func=cmd_reduce)

    m = sub.add_parser("measure", help="build representing measures")
    msub = m.add_subparsers(dest="kind", required=True)
    ap = msub.add_parser("approx", help="Lie-product word measure rho_N")
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--beta", type=float, required=True)
    ap.set_defaults(func=cmd_measure_approx)
    ex = msub.add_parser("exact", help="Bessel-density limit measure")
    ex.add_argument("--beta", type=float, required=True)
    ex.add_argument("--grid-points", type=int, default=1001)
    ex.set_defaults(func=cmd_measure_exact)
    sp = msub.add_parser("spectral", help="representing measure of tr exp(tA + B)")
    sp.add_argument("--matrix-a", required=True)
    sp.add_argument("--matrix-b", required=True)
    sp.add_argument("--grid-points", type=int, default=1001)
    sp.set_defaults(func=cmd_measure_spectral)
    for q in (ap, ex, sp):
        q.add_argument("--json", help="write the measure JSON here")
        q.add_argument("--csv", help="write the atom/density table here")

    v = sub.add_parser("verify", help="numerical checks")
    vsub = v.add_subparsers(dest="kind", required=True)
    cv = vsub.add_parser("convergence", help="Lie-product error table")
    cv.add_argument("--alpha", type=float, default=1.0)
    cv.add_argument("--beta", type=float, default=1.0)
    cv.add_argument("--t", type=float, default=1.0)
    cv.add_argument("--n-list", type=parse_int_list, default=[64, 128, 256])
    cv.set_defaults(func=cmd_verify_convergence)
    rp = vsub.add_parser("representation", help="Laplace transform of the limit measure")
    rp.add_argument("--alpha", type=float, default=1.0)
    rp.add_argument("--beta", type=float, default=1.0)
    rp.add_argument("--t-range", type=parse_range, default=parse_range("-5:5:21"))
    rp.set_defaults(func=cmd_verify_representation)
    cx = vsub.add_parser("convexity", help="Gram-matrix PSD certificate of tr exp(tA + B)")
    cx.add_argument("--matrix-a", required=True)
    cx.add_argument("--matrix-b", required=True)
    cx.add_argument("--grids", type=int, default=20)
    cx.add_argument("--max-size", type=int, default=12)
    cx.add_argument("--lo", type=float, default=-3.0)
    cx.add_argument("--hi", type=float, default=3.0)
    cx.add_argument("--seed", type=int, default=42)
    cx.set_defaults(func=cmd_verify_convexity)

    s = sub.add_parser("sample", help="CSV of t, f, e1, e2")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--t-range", type=parse_range, default=parse_range("-5:5:101"))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)
    return p


def _join_negative_values(argv: List[str]) -> List[str]:
    # argparse reads "--t-range -5:5:21" as two flags; glue such values on.
    out, i = [], 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    try:
        report = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantViolation, NoConvergence) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (DomainError, TraceExpError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    report = {"command": argv, **report}
    report["ok"] = all(c["pass"] for c in report["checks"])
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["ok"] else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
