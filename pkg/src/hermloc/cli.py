"""Command-line front end.

Subcommands:
  basis       tabulate psi_0..psi_J on a grid
  kernel      localized-kernel decay report
  quadrature  solve a rule from a points file and save it
  project     filtered projection or full frame decomposition of a target
  analyze     local smoothness map from frame-layer decay
  validate    run the named property suites

Exit codes: 0 success, 1 a validation suite failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .analysis import Window, local_smoothness_map
from .filters import LocalizedKernel, LowPassFilter, localization_report
from .hermite import psi_batch
from .integrate import make_grid
from .operators import (LEBESGUE, MeasureSequence, SampledFunction, builtin,
                        decompose, sigma)
from .quadrature import (ALPHA_DEFAULT, PointSet, build_rule, save_rule,
                         solve_mz_weights)
from .validation import DEFAULT_SEED, SUITE_NAMES, run_all, run_suite

MAX_LEVELS = 8


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


def parse_grid_spec(spec):
    """min:max:step -> numpy grid; the endpoints are both included."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"grid spec {spec!r} is not min:max:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"grid spec {spec!r}: {exc}") from None
    if step <= 0:
        raise InputError("grid step must be positive")
    if not hi > lo:
        raise InputError("grid max must exceed min")
    return make_grid(lo, hi, step)


def _atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_table(path, fmt, columns, rows):
    """Rows of floats as CSV (17 significant digits) or JSON."""
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(f"{v:.17g}" for v in row) for row in rows]
        _atomic_write(path, "\n".join(lines) + "\n")
    else:
        payload = {"columns": list(columns), "rows": [list(map(float, r)) for r in rows]}
        _atomic_write(path, json.dumps(payload, indent=2) + "\n")


def _load_samples(path):
    """Lines of 'x value' or 'x,value'; blank lines and # comments skipped."""
    xs, vs = [], []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                s = line.strip()
                if not s or s.startswith("#"):
                    continue
                parts = s.replace(",", " ").split()
                if len(parts) != 2:
                    raise InputError(f"{path}:{lineno}: expected 'x value'")
                xs.append(float(parts[0]))
                vs.append(float(parts[1]))
    except OSError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(xs) < 2:
        raise InputError(f"{path}: need at least two samples")
    return np.asarray(xs), np.asarray(vs)


def _resolve_target(args):
    if getattr(args, "fn", None):
        try:
            return builtin(args.fn)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    raise InputError("no target: pass --fn NAME")


def _check_levels(levels):
    if not 0 <= levels <= MAX_LEVELS:
        raise InputError(f"levels must be between 0 and {MAX_LEVELS}")
    return int(levels)


# ---------------------------------------------------------------------------
# subcommands

def cmd_basis(args):
    grid = parse_grid_spec(args.grid)
    if args.max_j < 0:
        raise InputError("--max-j must be >= 0")
    stack = psi_batch(args.max_j + 1, grid)
    columns = ["x"] + [f"psi_{j}" for j in range(args.max_j + 1)]
    rows = np.column_stack([grid, stack.T])
    out = args.out or f"basis.{args.output}"
    _write_table(out, args.output, columns, rows)
    print(f"wrote {len(rows)} rows x {len(columns)} columns to {out}")
    return 0


def cmd_kernel(args):
    if args.order <= 0:
        raise InputError("--order must be positive")
    filt = LowPassFilter(profile=args.profile, sharpness=args.sharpness)
    kern = LocalizedKernel(float(args.order), filt)
    grid = parse_grid_spec(args.grid)
    report = localization_report(kern, args.exponent, grid)
    out = args.out or "kernel_report.csv"
    report.to_csv(out)
    flag = "yes" if report.decay_ok else "NO"
    print(f"order {args.order:g} profile {args.profile}: normalized kernel sup "
          f"{max(report.kernel_sup):.6g}, derivative sup "
          f"{max(report.kernel_dx_sup):.6g}, far-zone decay ok: {flag}")
    print(f"wrote octave bins to {out}")
    return 0


def cmd_quadrature(args):
    try:
        pts = PointSet.from_file(args.points)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    decision, rule = build_rule(pts, alpha=args.alpha)
    if rule is None:
        raise InputError(f"point set rejected: {decision.message}")
    csv_path, json_path = save_rule(rule, args.out or "rule")
    status = "flagged" if rule.flagged else "ok"
    print(f"order {rule.order:.6g}, residual {rule.residual:.3g}, "
          f"regularity {rule.regularity:.4g}, {status}")
    print(f"wrote {csv_path} and {json_path}")
    return 0


def cmd_project(args):
    f = _resolve_target(args)
    grid = parse_grid_spec(args.grid)
    if args.levels is not None:
        levels = _check_levels(args.levels)
        aleph = MeasureSequence.lebesgue(levels)
        dec = decompose(aleph, f, grid, levels)
        out = args.out or f"decomposition.{args.output}"
        (dec.to_csv if args.output == "csv" else dec.to_json)(out)
        print(f"decomposed {args.fn} into levels 0..{levels} on {grid.size} points; "
              f"wrote {out}")
        return 0
    if args.order <= 0:
        raise InputError("--order must be positive")
    proj = sigma(args.order, LEBESGUE, f, grid)
    out = args.out or f"projection.{args.output}"
    (proj.to_csv if args.output == "csv" else proj.to_json)(out)
    print(f"projected {args.fn} at order {args.order:g} on {grid.size} points; wrote {out}")
    return 0


def _measures_from_samples(path, levels, alpha):
    xs, vs = _load_samples(path)
    order = np.argsort(xs)
    xs, vs = xs[order], vs[order]
    try:
        pts = PointSet.from_values(xs)
        f = SampledFunction(xs[:-1], vs[:-1])
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rules = []
    for k in range(levels + 1):
        order = 2.0 ** (k + 1)
        try:
            rule = solve_mz_weights(pts, order, alpha=alpha)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise InputError(f"samples too coarse for level {k} "
                             f"(order {order:g}): {exc}") from None
        if rule.flagged:
            raise InputError(f"level {k} rule flagged: residual {rule.residual:.3g}")
        rules.append(rule)
    return MeasureSequence.from_rules(rules), f


def cmd_analyze(args):
    levels = _check_levels(args.levels)
    if args.window_radius <= 0:
        raise InputError("--window-radius must be positive")
    centers = parse_grid_spec(args.grid)
    windows = [Window(float(c), args.window_radius) for c in centers]
    if args.samples:
        aleph, f = _measures_from_samples(args.samples, levels, args.alpha)
        name = args.samples
    else:
        f = _resolve_target(args)
        aleph = MeasureSequence.lebesgue(levels)
        name = args.fn
    report = local_smoothness_map(f, aleph, float("inf"), windows, levels)
    out = args.out or f"analysis.{args.output}"
    (report.to_csv if args.output == "csv" else report.to_json)(out)
    finite = [r for r in report.results if not r.resolved_smooth]
    if finite:
        worst = min(finite, key=lambda r: r.gamma_hat)
        print(f"{name}: {len(windows)} windows, depth {levels}; minimum gamma "
              f"{worst.gamma_hat:.4f} at center {worst.center:g}")
    else:
        print(f"{name}: {len(windows)} windows, depth {levels}; "
              f"all windows resolved-smooth")
    print(f"wrote {out}")
    return 0


def cmd_validate(args):
    if args.suite:
        if args.suite not in SUITE_NAMES:
            raise InputError(f"unknown suite {args.suite!r}; "
                             f"known: {', '.join(SUITE_NAMES)}")
        reports = [run_suite(args.suite, seed=args.seed)]
    else:
        reports = list(run_all(seed=args.seed))
    for rep in reports:
        print(rep.summary())
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            rep.to_json(os.path.join(args.out, f"{rep.suite}.json"))
    failed = [rep.suite for rep in reports if not rep.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return 1
    print(f"all {len(reports)} suite(s) passed")
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="hermloc",
        description="Localized approximation on the line by Hermite functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="tabulate psi_j values on a grid")
    p.add_argument("--max-j", type=int, default=4, help="largest index j (default 4)")
    p.add_argument("--grid", default="-3:3:0.5", help="grid as min:max:step")
    p.add_argument("--output", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default basis.<fmt>)")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("kernel", help="localized-kernel decay report")
    p.add_argument("--order", type=float, default=8.0, help="kernel order n")
    p.add_argument("--grid", default="-8:8:0.05", help="sample grid as min:max:step")
    p.add_argument("--exponent", type=float, default=6.0,
                   help="decay exponent S in the normalization (default 6)")
    p.add_argument("--profile", choices=("smooth", "indicator"), default="smooth")
    p.add_argument("--sharpness", type=float, default=1.0)
    p.add_argument("--out", help="report CSV path (default kernel_report.csv)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("quadrature", help="solve a rule from a points file")
    p.add_argument("--points", required=True, help="file with one abscissa per line")
    p.add_argument("--alpha", type=float, default=ALPHA_DEFAULT,
                   help=f"density ratio (default {ALPHA_DEFAULT:g})")
    p.add_argument("--out", help="output base path (default rule -> rule.csv/.json)")
    p.set_defaults(func=cmd_quadrature)

    p = sub.add_parser("project", help="filtered projection or frame decomposition")
    p.add_argument("--fn", required=True, help="built-in target name")
    p.add_argument("--order", type=float, default=8.0, help="projection order n")
    p.add_argument("--levels", type=int, default=None,
                   help="decompose into frame layers 0..N instead")
    p.add_argument("--grid", default="-8:8:0.01", help="evaluation grid min:max:step")
    p.add_argument("--output", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("analyze", help="local smoothness map")
    p.add_argument("--fn", help="built-in target name")
    p.add_argument("--samples", help="file of 'x value' samples (scattered data)")
    p.add_argument("--levels", type=int, default=6, help="frame depth N (default 6)")
    p.add_argument("--grid", default="-3:3:0.125",
                   help="window centers as min:max:stride")
    p.add_argument("--window-radius", type=float, default=0.25)
    p.add_argument("--alpha", type=float, default=ALPHA_DEFAULT,
                   help="density ratio for sample-built rules")
    p.add_argument("--output", choices=("csv", "json"), default="json")
    p.add_argument("--out", help="output path (default analysis.<fmt>)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="run the property suites")
    p.add_argument("--suite", help="run one suite instead of all")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="directory for per-suite JSON reports")
    p.set_defaults(func=cmd_validate)
    return parser


# flags whose values are min:max:step specs and may start with a minus sign,
# which bare argparse would misread as an option
_SPEC_FLAGS = ("--grid",)


def _fold_spec_flags(argv):
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _SPEC_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(_fold_spec_flags(argv))
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
