"""Command line interface: ``mrlsmooth {estimate,simulate,theory,bandwidth}``.

Exit codes: 0 success, 2 bad flags, 3 bad input data or config, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .asymptotics import ESTIMATOR_KINDS, eval_b, theoretical_bias_variance
from .bandwidth import BandwidthSelectionError, lscv_curve, select_bandwidth_lscv
from .dataio import (
    DataError,
    format_report_table,
    infer_support,
    read_csv_column,
    write_bias_csv,
    write_combined_csv,
    write_curve_csv,
    write_report_csv,
    write_theory_csv,
)
from .distributions import parse_distribution
from .estimators import METHODS, DomainError, EstimatorSpec, Sample, evaluate_curve
from .kernel import get_kernel
from .simulation import ConfigError, SimulationError, bias_profile, load_config, run_mc
from .transform import SupportInterval, transform_for_support

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _bandwidth(text):
    if text.lower() == "cv":
        return "cv"
    return _positive_float(text)


def _support(text):
    try:
        return SupportInterval.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid_points(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError("need at least 2 grid points")
    return v


def _add_shared(p, bandwidth_default="cv"):
    p.add_argument("--kernel", choices=["epanechnikov", "gaussian"], default="epanechnikov")
    p.add_argument("--transform", choices=["log", "probit", "identity"], default=None,
                   help="default: probit for bounded support, log for a half line")
    p.add_argument("--support", type=_support, default=None, metavar="a,b",
                   help="support of the data, e.g. 0,inf (default: inferred)")
    p.add_argument("--bandwidth", type=_bandwidth, default=bandwidth_default, metavar="{cv|H}")
    p.add_argument("--grid-min", type=float, default=None)
    p.add_argument("--grid-max", type=float, default=None)
    p.add_argument("--grid-points", type=_grid_points, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", "-o", default=None, help="output path (default: standard output)")
    p.add_argument("--combined", action="store_true", help="write all estimators to one wide CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrlsmooth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate S, SS and the MRL function from data")
    p.add_argument("--input", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--estimator", action="append", choices=[*METHODS, "all"],
                   help="repeatable; default transformed2")
    _add_shared(p)

    p = sub.add_parser("simulate", help="run a Monte-Carlo study from a config file")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    _add_shared(p)

    p = sub.add_parser("theory", help="leading-order bias and variance for a known distribution")
    p.add_argument("--distribution", required=True, help="e.g. exponential(1), gamma(2,3)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=ESTIMATOR_KINDS, default="mrl2")
    _add_shared(p, bandwidth_default=None)

    p = sub.add_parser("bandwidth", help="LSCV bandwidth for a data column")
    p.add_argument("--input", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--scale", choices=["transformed", "data"], default="transformed",
                   help="select on the transformed scale or on the data scale (naive)")
    _add_shared(p)
    return parser


# ---------------------------------------------------------------------------

def _note(msg):
    print(msg, file=sys.stderr)


def _load_sample(args):
    col = read_csv_column(args.input, args.column)
    if col.dropped:
        _note(f"warning: dropped {col.dropped} row(s) with missing or non-finite {args.column!r}")
    support = args.support or infer_support(col.values)
    try:
        sample = Sample(col.values, support)
    except DomainError as exc:
        raise DataError(f"{exc}; pass --support to override") from None
    name = args.transform
    if name is None and not math.isfinite(support.lower) and not math.isfinite(support.upper):
        name = "identity"
    try:
        tr = transform_for_support(support, name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return sample, tr


def _default_grid(support: SupportInterval, values, args):
    lo, hi = support.lower, support.upper
    vmax, vmin = float(np.max(values)), float(np.min(values))
    if math.isfinite(lo) and math.isfinite(hi):
        w = hi - lo
        gmin, gmax = lo + 1e-3 * w, hi - 1e-3 * w
    elif math.isfinite(lo):
        w = vmax - lo
        gmin, gmax = lo + 1e-3 * w, lo + 1.5 * w
    else:
        w = vmax - vmin
        gmin, gmax = vmin - 0.25 * w, vmax + 0.25 * w
    gmin = args.grid_min if args.grid_min is not None else gmin
    gmax = args.grid_max if args.grid_max is not None else gmax
    if not gmin < gmax:
        raise UsageError(f"--grid-min ({gmin}) must be below --grid-max ({gmax})")
    if not (support.contains(gmin) and support.contains(gmax)):
        raise UsageError(f"grid [{gmin}, {gmax}] must lie inside the support {support}")
    return np.linspace(gmin, gmax, args.grid_points)


def _spec_for(method, sample, tr, args, cache):
    kernel = get_kernel(args.kernel)
    if method == "empirical":
        return EstimatorSpec(method)
    use_tr = tr if method.startswith("transformed") else None
    h = args.bandwidth
    if h == "cv":
        key = use_tr.name if use_tr is not None else "data"
        if key not in cache:
            cache[key] = select_bandwidth_lscv(sample, use_tr, kernel)
        h = cache[key]
        _note(f"{method}: cross-validated bandwidth h = {h:.6g}")
    return EstimatorSpec(method, kernel, use_tr, h)


def _suffixed(path, method):
    p = Path(path)
    return p.with_name(f"{p.stem}_{method}{p.suffix or '.csv'}")


def cmd_estimate(args):
    methods = args.estimator or ["transformed2"]
    if "all" in methods:
        methods = list(METHODS)
    methods = list(dict.fromkeys(methods))
    sample, tr = _load_sample(args)
    grid = _default_grid(sample.support, sample.values, args)
    cache = {}
    curves = [evaluate_curve(_spec_for(m, sample, tr, args, cache), sample, grid) for m in methods]
    for c in curves:
        bad = int(np.sum(c.flags == "invalid"))
        if bad:
            _note(f"{c.method}: {bad} grid point(s) could not be evaluated (flag 'invalid')")
    if args.combined or len(curves) == 1:
        writer = write_combined_csv if args.combined else (lambda d, cs: write_curve_csv(d, cs[0]))
        writer(args.output or sys.stdout, curves)
    else:
        if not args.output:
            raise UsageError("several estimators need --output (one file each) or --combined")
        for c in curves:
            path = _suffixed(args.output, c.method)
            write_curve_csv(path, c)
            _note(f"wrote {path}")
    return EXIT_OK


def cmd_simulate(args):
    mode, configs = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        overrides["workers"] = args.workers
    configs = [replace(c, **overrides) for c in configs]
    out = args.output or sys.stdout
    if mode == "bias":
        profiles = [(c, bias_profile(c)) for c in configs]
        write_bias_csv(out, profiles)
        for c, prof in profiles:
            _note(f"{c.distribution}: bias profile on {prof.grid.size} points, failures {prof.failures}")
        return EXIT_OK
    reports = []
    for c in configs:
        rep = run_mc(c)
        reports.append(rep)
        print(format_report_table(rep), end="\n\n", file=sys.stdout if args.output else sys.stderr)
    write_report_csv(out, reports)
    return EXIT_OK


def cmd_theory(args):
    if not isinstance(args.bandwidth, float):
        raise UsageError("theory needs a numeric --bandwidth")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    try:
        dist = parse_distribution(args.distribution)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    support = args.support or dist.support
    if support != dist.support:
        raise UsageError(f"--support {support} differs from the support of {dist} ({dist.support})")
    try:
        tr = transform_for_support(support, args.transform)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lo, hi = support.lower, support.upper
    top = dist.mean + 3.0 * dist.std
    span = min(hi - lo, top - lo)
    gmin = args.grid_min if args.grid_min is not None else lo + 1e-3 * span
    gmax = args.grid_max if args.grid_max is not None else min(top, hi - 1e-3 * span)
    if not (gmin < gmax and support.contains(gmin) and support.contains(gmax)):
        raise UsageError(f"grid [{gmin}, {gmax}] must be increasing and inside {support}")
    rows = []
    for t in np.linspace(gmin, gmax, args.grid_points):
        b = eval_b(dist, tr, float(t))
        mom = theoretical_bias_variance(dist, tr, args.kernel, args.bandwidth, args.n, float(t), args.kind)
        rows.append((t, *b, mom.bias, mom.variance))
    write_theory_csv(args.output or sys.stdout, rows)
    return EXIT_OK


def cmd_bandwidth(args):
    sample, tr = _load_sample(args)
    use_tr = tr if args.scale == "transformed" else None
    grid, scores = lscv_curve(sample, use_tr, args.kernel)
    h = select_bandwidth_lscv(sample, use_tr, args.kernel)
    print(repr(h))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write("h,lscv\n")
            for g, s in zip(grid, scores):
                fh.write(f"{float(g)!r},{float(s)!r}\n")
    return EXIT_OK


_COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "theory": cmd_theory,
    "bandwidth": cmd_bandwidth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (DataError, ConfigError, DomainError) as exc:
        _note(f"error: {exc}")
        return EXIT_DATA
    except (FloatingPointError, BandwidthSelectionError, SimulationError, ArithmeticError) as exc:
        _note(f"numeric error: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
