"""Synthetic run directories built directly from the file contracts.

Nothing here touches the solver package. Run directories are written in
the documented formats so the reader and figure code can be tested in
isolation; only the acceptance test drives the real CLI.
"""

import os

import numpy as np

from sbpflow_reports.readers import TIMESERIES_COLUMNS


def write_timeseries(path, columns):
    """Write a timeseries.csv from a dict of per-column float lists."""
    names = list(columns)
    n = len(columns[names[0]])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for k in range(n):
            fh.write(",".join(repr(float(columns[name][k]))
                              for name in names) + "\n")


def write_report_file(path, entries):
    """Write a report.txt from (key, value) pairs."""
    with open(path, "w", encoding="utf-8") as fh:
        for key, val in entries:
            fh.write(f"{key} = {val}\n")


def decay_columns(n=25, seed=0):
    """Plausible decaying-run timeseries with every pinned column."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n)
    energy = 2.0 * np.exp(-0.7 * t)
    de_dt = -1.4 * np.exp(-0.7 * t)
    dissipation = -de_dt
    cols = {
        "t": t,
        "energy": energy,
        "dE_dt": de_dt,
        "dissipation": dissipation,
        "bt_advective": 1e-6 * rng.standard_normal(n),
        "bt_viscous": 1e-7 * rng.standard_normal(n),
        "sat_energy": 1e-6 * rng.standard_normal(n),
        "residual": 1e-15 * rng.standard_normal(n),
        "constraint_norm": 1e-10 * np.abs(rng.standard_normal(n)),
        "total_mass": np.full(n, 3.5),
        "alpha_min": np.full(n, 0.1),
        "alpha_max": np.full(n, 0.9),
    }
    assert list(cols) == TIMESERIES_COLUMNS
    return cols


def make_run_dir(root, name, columns=None, report=None):
    """Create a schema-conformant run directory and return its path."""
    run_dir = os.path.join(str(root), name)
    os.makedirs(run_dir, exist_ok=True)
    if columns is None:
        columns = decay_columns()
    write_timeseries(os.path.join(run_dir, "timeseries.csv"), columns)
    if report is None:
        report = [("scenario", "synthetic"), ("order", "2"),
                  ("nx", "17"), ("ny", "17"), ("steps", str(len(columns["t"])))]
    write_report_file(os.path.join(run_dir, "report.txt"), report)
    return run_dir


def vortex_run_dir(root, name, h, err_u, err_p, scenario="synthetic-vortex",
                   order="2"):
    """Run directory carrying the analytic-reference error entries."""
    report = [
        ("scenario", scenario), ("order", order), ("nx", "17"), ("ny", "17"),
        ("l2_error_u", repr(err_u)), ("l2_error_p", repr(err_p)),
        ("grid_h", repr(h)),
    ]
    return make_run_dir(root, name, report=report)
