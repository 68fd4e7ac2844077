"""CSV and report writers for run outputs.

All floats are written with repr (17 significant digits) so reruns of the
same configuration produce byte-identical files.
"""

from __future__ import annotations

import csv
import os

import numpy as np

TIMESERIES_COLUMNS = [
    "t", "energy", "dE_dt", "dissipation", "bt_advective", "bt_viscous",
    "sat_energy", "residual", "constraint_norm", "total_mass",
    "alpha_min", "alpha_max",
]


def _fmt(x) -> str:
    return repr(float(x))


def write_timeseries(path: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMESERIES_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in TIMESERIES_COLUMNS])


def read_timeseries(path: str) -> dict:
    """Read a timeseries CSV back into a dict of float arrays."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = {name: [] for name in header}
        for row in reader:
            for name, val in zip(header, row):
                cols[name].append(float(val))
    return {name: np.asarray(vals) for name, vals in cols.items()}


SNAPSHOT_COLUMNS = ["x", "y", "alpha", "u1", "u2", "p", "phi0", "phi1", "phi2", "phi3"]


def write_snapshot(path: str, state, fluids, grid, order: int, t: float, step: int) -> None:
    """Node-by-node snapshot with a metadata comment line, x-major order."""
    from .fields import alpha_of, state_to_primitives

    rho, u1, u2, p = state_to_primitives(state)
    alpha = alpha_of(state, fluids)
    X, Y = grid.mesh()
    meta = (f"# t={_fmt(t)} step={step} nx={grid.nx} ny={grid.ny} "
            f"x0={_fmt(grid.x0)} x1={_fmt(grid.x1)} "
            f"y0={_fmt(grid.y0)} y1={_fmt(grid.y1)} order={order}")
    fields = [X, Y, alpha, u1, u2, p, state.phi0, state.phi1, state.phi2, state.phi3]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(meta + "\n")
        writer = csv.writer(fh)
        writer.writerow(SNAPSHOT_COLUMNS)
        for i in range(grid.nx):
            for j in range(grid.ny):
                writer.writerow([_fmt(f[i, j]) for f in fields])


def read_snapshot(path: str):
    """Read a snapshot CSV back into (meta dict, dict of (nx, ny) arrays)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        metaline = fh.readline().strip()
        if not metaline.startswith("#"):
            raise ValueError(f"snapshot {path!r} missing metadata line")
        meta = {}
        for tok in metaline[1:].split():
            key, _, val = tok.partition("=")
            meta[key] = val
        reader = csv.reader(fh)
        header = next(reader)
        cols = {name: [] for name in header}
        for row in reader:
            for name, val in zip(header, row):
                cols[name].append(float(val))
    nx, ny = int(meta["nx"]), int(meta["ny"])
    arrays = {name: np.asarray(vals).reshape(nx, ny) for name, vals in cols.items()}
    return meta, arrays


def write_report(path: str, entries) -> None:
    """key = value report lines; floats via repr for determinism."""
    with open(path, "w", encoding="utf-8") as fh:
        for key, val in entries:
            if isinstance(val, float):
                val = _fmt(val)
            fh.write(f"{key} = {val}\n")


def read_report(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
