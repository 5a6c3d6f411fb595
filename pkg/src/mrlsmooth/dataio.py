"""CSV ingestion and the CSV / text outputs of the command line tool."""

from __future__ import annotations

import csv
import math
from contextlib import contextmanager
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .estimators import CurveEstimate
from .transform import SupportInterval

__all__ = [
    "DataError",
    "ColumnData",
    "read_csv_column",
    "infer_support",
    "CURVE_HEADER",
    "THEORY_HEADER",
    "write_curve_csv",
    "read_curve_csv",
    "write_combined_csv",
    "write_theory_csv",
    "write_report_csv",
    "write_bias_csv",
    "format_report_table",
]

CURVE_HEADER = ("t", "survival", "cum_survival", "mrl", "flag")
THEORY_HEADER = ("t", "b1", "b2", "b3", "b4", "b5", "bias", "var")
REPORT_HEADER = (
    "distribution", "n", "reps", "estimator", "metric", "t", "value", "mc_se",
    "ise_min", "ise_max", "failures",
)
BIAS_HEADER = ("distribution", "n", "reps", "estimator", "t", "bias", "mc_se")


class DataError(ValueError):
    """Unreadable or unusable input data."""


class ColumnData(NamedTuple):
    values: np.ndarray
    dropped: int


def read_csv_column(path, column: str) -> ColumnData:
    """Read one numeric column from a headed CSV file.

    Rows whose cell is blank, unparseable or non-finite are dropped and counted
    in ``dropped``.
    """
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror or exc}") from None
    with fh:
        try:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header:
                raise DataError(f"{path} has no header row")
            header = [h.strip() for h in header]
            if column not in header:
                raise DataError(f"column {column!r} not found in {path}; available columns: {', '.join(header)}")
            idx = header.index(column)
            values, dropped = [], 0
            for row in reader:
                if not row or all(not c.strip() for c in row):
                    continue
                cell = row[idx].strip() if idx < len(row) else ""
                try:
                    v = float(cell)
                except ValueError:
                    dropped += 1
                    continue
                if math.isfinite(v):
                    values.append(v)
                else:
                    dropped += 1
        except (csv.Error, UnicodeDecodeError) as exc:
            raise DataError(f"cannot parse {path}: {exc}") from None
    if not values:
        raise DataError(f"column {column!r} in {path} has no usable values")
    return ColumnData(np.asarray(values, dtype=float), dropped)


def infer_support(values) -> SupportInterval:
    """``(0, 1)`` for data in ``[0, 1]``, ``(0, inf)`` for nonnegative data,
    otherwise the whole line."""
    v = np.asarray(values, dtype=float)
    if v.min() >= 0.0:
        if v.max() <= 1.0:
            return SupportInterval(0.0, 1.0)
        return SupportInterval(0.0, math.inf)
    return SupportInterval(-math.inf, math.inf)


@contextmanager
def _open_out(dest):
    """Yield a text handle for a path, or pass an open handle through."""
    if hasattr(dest, "write"):
        yield dest
    else:
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _fmt(x) -> str:
    return repr(float(x))


def write_curve_csv(dest, curve: CurveEstimate):
    with _open_out(dest) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for row in zip(curve.grid, curve.survival, curve.cum_survival, curve.mrl, curve.flags):
            w.writerow([*map(_fmt, row[:4]), row[4]])


def read_curve_csv(path) -> CurveEstimate:
    """Read back a file written by :func:`write_curve_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != CURVE_HEADER:
            raise DataError(f"{path} is not a curve file (header {header})")
        rows = list(reader)
    cols = list(zip(*rows)) if rows else [()] * 5
    arrs = [np.asarray(c, dtype=float) for c in cols[:4]]
    return CurveEstimate(*arrs, np.asarray(cols[4], dtype=object))


def write_combined_csv(dest, curves: list[CurveEstimate]):
    """Wide CSV: ``t`` followed by four columns per estimator."""
    grid = curves[0].grid
    for c in curves[1:]:
        if not np.array_equal(c.grid, grid):
            raise ValueError("combined output needs a common grid")
    with _open_out(dest) as fh:
        w = csv.writer(fh, lineterminator="\n")
        head = ["t"]
        for c in curves:
            head += [f"{col}_{c.method}" for col in CURVE_HEADER[1:]]
        w.writerow(head)
        for i, t in enumerate(grid):
            row = [_fmt(t)]
            for c in curves:
                row += [_fmt(c.survival[i]), _fmt(c.cum_survival[i]), _fmt(c.mrl[i]), c.flags[i]]
            w.writerow(row)


def write_theory_csv(dest, rows):
    with _open_out(dest) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(THEORY_HEADER)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _range_comment(report) -> str:
    lo, hi = report.ise_range
    return f"# {report.config.distribution}: ISE range [{lo:.6g}, {hi:.6g}], {report.config.grid_points} points\n"


def write_report_csv(dest, reports):
    """One row per distribution x estimator x metric, after ``#`` comment
    lines stating the ISE range of each distribution."""
    with _open_out(dest) as fh:
        for rep in reports:
            fh.write(_range_comment(rep))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for rep in reports:
            cfg = rep.config
            lo, hi = rep.ise_range
            for label, metric, t, value, se in rep.rows():
                w.writerow([
                    str(cfg.distribution), cfg.n, cfg.reps, label, metric,
                    "" if math.isnan(t) else _fmt(t), _fmt(value), _fmt(se),
                    _fmt(lo), _fmt(hi), rep.failures[label],
                ])


def write_bias_csv(dest, profiles):
    """Long format bias profile; ``profiles`` holds ``(config, BiasProfile)`` pairs."""
    with _open_out(dest) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BIAS_HEADER)
        for cfg, prof in profiles:
            for label in prof.bias:
                for t, b, s in zip(prof.grid, prof.bias[label], prof.se[label]):
                    w.writerow([str(cfg.distribution), cfg.n, cfg.reps, label, _fmt(t), _fmt(b), _fmt(s)])


def format_report_table(report) -> str:
    """Human readable summary of one :class:`SimulationReport`."""
    cfg = report.config
    lo, hi = report.ise_range
    anchors = list(cfg.ase_points)
    lines = [
        f"{cfg.distribution}  n={cfg.n}  reps={cfg.reps}  ISE range [{lo:.4g}, {hi:.4g}]"
        f"  ({report.wall_time:.1f} s)",
    ]
    head = f"{'estimator':<14}{'AISE':>22}" + "".join(f"{'ASE t=' + format(t, '.4g'):>22}" for t in anchors)
    lines += [head, "-" * len(head)]
    for label, st in report.aise.items():
        cells = [f"{st.value:.5g} ({st.se:.2g})"]
        cells += [f"{report.ase[label][t].value:.5g} ({report.ase[label][t].se:.2g})" for t in anchors]
        lines.append(f"{label:<14}" + "".join(f"{c:>22}" for c in cells))
    if any(report.failures.values()):
        lines.append(f"failures: {report.failures}")
    return "\n".join(lines)
