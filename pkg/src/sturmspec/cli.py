"""Command-line front end.

Every subcommand writes one CSV or JSON artifact.  Output goes to ``--out``
if given, else to ``$STURMSPEC_OUTPUT_DIR/<subcommand>.<format>`` if that
variable is set, else to stdout.  Invalid arguments exit with status 2 and
computation failures with status 1; both print a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import checks
from .ids import count_below_energies, dos_local_dimension, gap_labels, ids_curve, match_gaps_to_labels, potential
from .numberth import CFParseError, approximants, format_cf, parse_cf
from .spectrum import (
    BandCountError,
    MAX_LEVEL_SIZE,
    bands,
    box_dimension,
    default_scales,
    gap_opening_study,
    gaps_from_bands,
    spectrum_cover,
    thickness_denseness,
)
from .tracemap import ModelParams, fricke_vogt, trace_orbit
from .words import (
    cmps_substitution,
    rotation_sequence,
    rotation_slope,
    sturmian_word_by_recursion,
)

OUTPUT_DIR_ENV = "STURMSPEC_OUTPUT_DIR"

REPORT_COMMANDS = {"word", "dimension", "dos-dimension", "check"}


class UsageError(Exception):
    """Bad flags or out-of-range values; exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- formatting --------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def render_table(columns: list[str], rows: list[tuple], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, map(_jsonable, r))) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(report), indent=2) + "\n"
    return render_table(["key", "value"], list(report.items()), "csv")


def emit(text: str, args) -> None:
    path = args.out
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{args.format}"
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# -- subcommands -------------------------------------------------------------


def cmd_approximants(args):
    alpha = args.alpha
    rows = [(ap.k, alpha[ap.k], ap.p, ap.q) for ap in approximants(alpha, args.level)]
    return render_table(["k", "a_k", "p", "q"], rows, args.format)


def cmd_word(args):
    alpha = args.alpha
    if args.level is not None:
        word = sturmian_word_by_recursion(alpha, args.level)
        kind = "standard"
    else:
        word = rotation_sequence(alpha, args.omega, args.length)
        kind = "rotation"
    beta = rotation_slope(alpha)
    sub = cmps_substitution(beta)
    report = {
        "alpha": format_cf(alpha),
        "kind": kind,
        "omega": args.omega if kind == "rotation" else 0.0,
        "level": args.level,
        "length": len(word),
        "ones": word.count("1"),
        "slope": f"[{beta.lead};" + ",".join([*map(str, beta.preperiod), "(" + ",".join(map(str, beta.period)) + ")"]) + "]",
        "substitution": None if sub is None else [sub.image0, sub.image1],
        "word": word,
    }
    if args.format == "csv":
        return render_table(["n", "letter"], [(i + 1, c) for i, c in enumerate(word)], "csv")
    return render_report(report, "json")


def cmd_trace_orbit(args):
    params = ModelParams(args.lam, args.alpha)
    res = trace_orbit(params, args.energy, args.level)
    level = params.invariant
    rows = [(k, a, p.x, p.y, p.z, float(fricke_vogt(p)) - level) for k, a, p in res.trajectory]
    return render_table(["k", "a_k", "x", "y", "z", "I-drift"], rows, args.format)


def cmd_spectrum(args):
    params = ModelParams(args.lam, args.alpha)
    bs = spectrum_cover(params, args.level) if args.cover else bands(params, args.level)
    rows = [(args.level, b.lo, b.hi) for b in bs]
    return render_table(["level", "lo", "hi"], rows, args.format)


def cmd_gaps(args):
    params = ModelParams(args.lam, args.alpha)
    gaps = gaps_from_bands(spectrum_cover(params, args.level))
    tol = 3.0 / args.size if args.tol is None else args.tol
    if gaps:
        op = potential(params, args.omega, args.size)
        n = count_below_energies(op, [g.midpoint for g in gaps]) / args.size
        labels = gap_labels(args.alpha, range(-args.max_label, args.max_label + 1))
        gaps = match_gaps_to_labels(gaps, n, labels, tol).gaps
    rows = [(args.level, g.lo, g.hi, g.label, g.ids_value if g.label is not None else None) for g in gaps]
    return render_table(["level", "lo", "hi", "label", "ids_value"], rows, args.format)


def cmd_dimension(args):
    params = ModelParams(args.lam, args.alpha)
    bs = spectrum_cover(params, args.level)
    th = thickness_denseness(bs)
    scales = default_scales(bs)
    report = {**th.as_dict(), "boxdim": box_dimension(bs, scales), "scales": list(scales)}
    return render_report(report, args.format)


def cmd_gap_opening(args):
    rows = gap_opening_study(args.alpha, args.label, args.lambdas, level=args.level, size=args.size)
    out = [(r.lam, r.width, r.ratio, r.ids_value, r.lo, r.hi, r.error) for r in rows]
    return render_table(["lambda", "width", "ratio", "ids_value", "lo", "hi", "error"], out, args.format)


def _ids_table(args):
    params = ModelParams(args.lam, args.alpha)
    b = params.energy_bound
    lo = -b - 0.05 if args.emin is None else args.emin
    hi = b + 0.05 if args.emax is None else args.emax
    return ids_curve(params, args.omega, args.size, np.linspace(lo, hi, args.grid), workers=args.workers)


def cmd_ids(args):
    tab = _ids_table(args)
    return render_table(["E", "N"], list(zip(tab.energies, tab.values)), args.format)


def cmd_gap_labels(args):
    rows = gap_labels(args.alpha, range(-args.max_label, args.max_label + 1))
    return render_table(["m", "value"], [(m, v) for m, v in rows if m != 0], args.format)


def cmd_dos_dimension(args):
    tab = _ids_table(args)
    est = dos_local_dimension(tab, sample_count=args.samples, seed=args.seed)
    report = {"alpha": format_cf(args.alpha), "lambda": args.lam, "size": args.size, "grid": args.grid, **est.as_dict()}
    return render_report(report, args.format)


def cmd_check(args):
    results = checks.run_all(seed=args.seed)
    report = {"passed": all(r.passed for r in results), "checks": [r.as_dict() for r in results]}
    if args.format == "csv":
        text = render_table(["name", "passed", "value", "tol"], [(r.name, r.passed, r.value, r.tol) for r in results], "csv")
    else:
        text = render_report(report, "json")
    return text, (0 if report["passed"] else 1)


COMMANDS = {
    "approximants": cmd_approximants,
    "word": cmd_word,
    "trace-orbit": cmd_trace_orbit,
    "spectrum": cmd_spectrum,
    "gaps": cmd_gaps,
    "dimension": cmd_dimension,
    "gap-opening": cmd_gap_opening,
    "ids": cmd_ids,
    "gap-labels": cmd_gap_labels,
    "dos-dimension": cmd_dos_dimension,
    "check": cmd_check,
}


# -- parsing and validation --------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sturmspec", description="Spectra of Sturmian Schrodinger operators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, *groups, **defaults):
        sp = sub.add_parser(name)
        sp.add_argument("--format", choices=["csv", "json"], default="json" if name in REPORT_COMMANDS else "csv")
        sp.add_argument("--out", default=None)
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--seed", type=int, default=0)
        if "alpha" in groups:
            sp.add_argument("--alpha", default="[0;(1)]")
        if "lam" in groups:
            sp.add_argument("--lambda", dest="lam", type=float, default=defaults.get("lam", 1.0))
        if "omega" in groups:
            sp.add_argument("--omega", type=float, default=0.0)
        if "level" in groups:
            sp.add_argument("--level", type=int, default=defaults.get("level", 10))
        if "size" in groups:
            sp.add_argument("--size", type=int, default=10**4)
        if "grid" in groups:
            sp.add_argument("--grid", type=int, default=defaults.get("grid", 2001))
            sp.add_argument("--emin", type=float, default=None)
            sp.add_argument("--emax", type=float, default=None)
        return sp

    add("approximants", "alpha", "level")
    w = add("word", "alpha", "omega")
    w.add_argument("--length", type=int, default=100)
    w.add_argument("--level", type=int, default=None, help="emit the standard word w_k instead")
    t = add("trace-orbit", "alpha", "lam", "level")
    t.add_argument("--energy", type=float, required=True)
    s = add("spectrum", "alpha", "lam", "level")
    s.add_argument("--cover", action="store_true", help="union of levels k and k+1")
    g = add("gaps", "alpha", "lam", "omega", "level", "size")
    g.add_argument("--max-label", type=int, default=20)
    g.add_argument("--tol", type=float, default=None)
    add("dimension", "alpha", "lam", "level", level=12)
    o = add("gap-opening", "alpha", "level", "size", level=12)
    o.add_argument("--label", type=int, default=1)
    o.add_argument("--lambdas", default="0.4,0.2,0.1,0.05")
    add("ids", "alpha", "lam", "omega", "size", "grid")
    gl = add("gap-labels", "alpha")
    gl.add_argument("--max-label", type=int, default=10)
    d = add("dos-dimension", "alpha", "lam", "omega", "size", "grid", grid=20001)
    d.add_argument("--samples", type=int, default=200)
    add("check")
    return p


def _positive(name, value, minimum=1):
    if value is not None and value < minimum:
        raise UsageError(f"{name} must be ≥ {minimum}")


def validate(args) -> None:
    """Convert and range-check arguments before any computation."""
    if hasattr(args, "alpha"):
        try:
            args.alpha = parse_cf(args.alpha)
        except (CFParseError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    if getattr(args, "lam", None) is not None and not args.lam >= 0:
        raise UsageError("lambda must be ≥ 0")
    if hasattr(args, "omega") and not 0.0 <= args.omega < 1.0:
        raise UsageError("omega must lie in [0, 1)")
    _positive("workers", args.workers)
    _positive("level", getattr(args, "level", None))
    _positive("size", getattr(args, "size", None))
    _positive("length", getattr(args, "length", None))
    _positive("grid", getattr(args, "grid", None), 2)
    _positive("samples", getattr(args, "samples", None))
    _positive("max-label", getattr(args, "max_label", None), 0)
    if getattr(args, "tol", None) is not None and args.tol < 0:
        raise UsageError("tol must be ≥ 0")
    if getattr(args, "emin", None) is not None and getattr(args, "emax", None) is not None and args.emin >= args.emax:
        raise UsageError("emin must be below emax")
    if args.command == "gap-opening":
        try:
            args.lambdas = [float(x) for x in args.lambdas.split(",") if x.strip()]
        except ValueError:
            raise UsageError("lambdas must be a comma-separated list of numbers") from None
        if not args.lambdas or any(not x > 0 for x in args.lambdas):
            raise UsageError("lambdas must be > 0")
    if args.command in {"approximants", "trace-orbit", "spectrum", "gaps", "dimension", "gap-opening"}:
        # covers use levels k and k+1
        cover = args.command in {"gaps", "dimension", "gap-opening"} or getattr(args, "cover", False)
        try:
            q = approximants(args.alpha, args.level + int(cover))[-1].q
        except OverflowError as exc:
            raise UsageError(str(exc)) from None
        if args.command not in {"approximants", "trace-orbit"} and q > MAX_LEVEL_SIZE:
            raise UsageError(f"level too deep: q = {q} exceeds {MAX_LEVEL_SIZE}")


def _fail(status: int, message: str, kind: str) -> int:
    sys.stderr.write(json.dumps({"error": message, "kind": kind, "status": status}, ensure_ascii=False) + "\n")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        validate(args)
    except UsageError as exc:
        return _fail(2, str(exc), "usage")
    try:
        result = COMMANDS[args.command](args)
        status = 0
        if isinstance(result, tuple):
            result, status = result
        emit(result, args)
    except (BandCountError, OverflowError, ValueError, RuntimeError, OSError) as exc:
        return _fail(1, str(exc), type(exc).__name__)
    return status


if __name__ == "__main__":
    sys.exit(main())
