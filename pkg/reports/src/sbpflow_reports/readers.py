"""Parsers for the run-directory file contracts.

A run directory holds timeseries.csv (one row per accepted step with the
energy-budget columns) and report.txt (key = value summary lines). Both are
validated on read; anything missing or garbled raises ReportError with the
offending path.
"""

import csv
import os

import numpy as np

TIMESERIES_COLUMNS = [
    "t", "energy", "dE_dt", "dissipation", "bt_advective", "bt_viscous",
    "sat_energy", "residual", "constraint_norm", "total_mass",
    "alpha_min", "alpha_max",
]


class ReportError(ValueError):
    """Missing or malformed run-directory input."""


def read_timeseries(path):
    """Timeseries CSV as a dict of float arrays, validated against the schema."""
    if not os.path.isfile(path):
        raise ReportError(f"missing timeseries file: {path!r}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ReportError(f"empty timeseries file: {path!r}") from None
        missing = [c for c in TIMESERIES_COLUMNS if c not in header]
        if missing:
            raise ReportError(
                f"timeseries {path!r} lacks columns {missing}, found {header}")
        cols = {name: [] for name in header}
        for k, row in enumerate(reader):
            if len(row) != len(header):
                raise ReportError(
                    f"timeseries {path!r} row {k + 2}: expected "
                    f"{len(header)} fields, got {len(row)}")
            for name, val in zip(header, row):
                try:
                    cols[name].append(float(val))
                except ValueError:
                    raise ReportError(
                        f"timeseries {path!r} row {k + 2}: "
                        f"non-numeric {name} value {val!r}") from None
    if not cols["t"]:
        raise ReportError(f"timeseries {path!r} has a header but no rows")
    return {name: np.asarray(vals) for name, vals in cols.items()}


def read_report(path):
    """report.txt as a dict of strings (key = value per line)."""
    if not os.path.isfile(path):
        raise ReportError(f"missing report file: {path!r}")
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for k, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep or not key.strip():
                raise ReportError(f"report {path!r} line {k + 1}: "
                                  f"expected 'key = value', got {line!r}")
            out[key.strip()] = val.strip()
    if not out:
        raise ReportError(f"report {path!r} is empty")
    return out


def load_run(run_dir):
    """Read one run directory into (timeseries dict, report dict)."""
    if not os.path.isdir(run_dir):
        raise ReportError(f"not a run directory: {run_dir!r}")
    series = read_timeseries(os.path.join(run_dir, "timeseries.csv"))
    report = read_report(os.path.join(run_dir, "report.txt"))
    return series, report


def run_label(report):
    """Short human label for a run, built from its report entries."""
    scenario = report.get("scenario", "run")
    nx = report.get("nx", "?")
    ny = report.get("ny", "?")
    order = report.get("order", "?")
    return f"{scenario} {nx}x{ny} order {order}"
