"""Convergence tables and log-log plots over a series of run directories.

The runs must come from the same scenario at the same operator order and
carry the analytic-reference error entries (l2_error_u, grid_h) in their
report files. Observed orders are computed between consecutive grids after
sorting coarse to fine.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .budget import SAVE_KW
from .readers import ReportError, load_run

ERROR_KEYS = ["l2_error_u", "l2_error_p"]


def _require(report, key, run_dir):
    if key not in report:
        raise ReportError(
            f"run {run_dir!r} has no {key} entry; convergence mode needs "
            "runs from a scenario with an analytic reference")
    return report[key]


def _observed_order(e_coarse, e_fine, h_coarse, h_fine):
    """log-ratio convergence order, or None when the grids coincide."""
    if h_coarse == h_fine:
        return None
    if e_coarse <= 0.0 or e_fine <= 0.0:
        return None
    return float(np.log(e_coarse / e_fine) / np.log(h_coarse / h_fine))


def convergence_table(run_dirs):
    """Error-vs-h rows for a nested-run series, coarse to fine.

    Returns (rows, meta): each row has h, the errors, and the observed
    order from the previous grid (None on the first row or for repeated
    grids); meta carries the shared scenario name and operator order.
    """
    if len(run_dirs) < 3:
        raise ReportError(
            f"convergence mode needs at least 3 runs, got {len(run_dirs)}")
    loaded = []
    for run_dir in run_dirs:
        _, report = load_run(run_dir)
        entry = {
            "run_dir": run_dir,
            "scenario": _require(report, "scenario", run_dir),
            "order": _require(report, "order", run_dir),
            "h": float(_require(report, "grid_h", run_dir)),
        }
        for key in ERROR_KEYS:
            if key in report:
                entry[key] = float(report[key])
        if "l2_error_u" not in entry:
            raise ReportError(
                f"run {run_dir!r} has no l2_error_u entry; convergence mode "
                "needs runs from a scenario with an analytic reference")
        loaded.append(entry)
    scenarios = {e["scenario"] for e in loaded}
    if len(scenarios) > 1:
        raise ReportError(
            f"convergence runs mix scenarios {sorted(scenarios)}; "
            "all runs must share one scenario")
    orders = {e["order"] for e in loaded}
    if len(orders) > 1:
        raise ReportError(
            f"convergence runs mix operator orders {sorted(orders)}")
    loaded.sort(key=lambda e: -e["h"])

    rows = []
    for k, entry in enumerate(loaded):
        row = {"run_dir": entry["run_dir"], "h": entry["h"]}
        for key in ERROR_KEYS:
            if key not in entry:
                continue
            row[key] = entry[key]
            order = None
            if k > 0 and key in loaded[k - 1]:
                order = _observed_order(loaded[k - 1][key], entry[key],
                                        loaded[k - 1]["h"], entry["h"])
            row[f"order_{key}"] = order
        rows.append(row)
    meta = {"scenario": loaded[0]["scenario"], "order": loaded[0]["order"]}
    return rows, meta


def _fmt_order(order):
    return "n/a" if order is None else f"{order:.3f}"


def convergence_markdown(rows, meta):
    keys = [k for k in ERROR_KEYS if k in rows[0]]
    lines = [f"# Convergence: {meta['scenario']}, order {meta['order']}", ""]
    header = ["h"]
    for key in keys:
        header.extend([key, "order"])
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + " --- |" * len(header))
    for row in rows:
        cells = [f"{row['h']:.6e}"]
        for key in keys:
            cells.append(f"{row[key]:.6e}")
            cells.append(_fmt_order(row.get(f"order_{key}")))
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    return "\n".join(lines)


def convergence_plot(rows, meta, path):
    """Log-log error plot with reference slopes at p and p-1."""
    h = np.array([row["h"] for row in rows])
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    for key in ERROR_KEYS:
        if key not in rows[0]:
            continue
        err = np.array([row[key] for row in rows])
        ax.loglog(h, err, marker="o", label=key)
    p = int(meta["order"])
    e0 = rows[0]["l2_error_u"]
    for slope, style in [(p, "--"), (p - 1, ":")]:
        ref = e0 * (h / h[0]) ** slope
        ax.loglog(h, ref, style, color="gray", label=f"h^{slope}")
    ax.set_xlabel("h")
    ax.set_ylabel("L2 error")
    ax.set_title(f"Convergence: {meta['scenario']}, order {meta['order']}")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **SAVE_KW)
    plt.close(fig)


def write_convergence_report(run_dirs, out_dir=None):
    """Build the table and plot, writing into out_dir.

    Default output location is report/ inside the first run directory.
    Returns the list of paths written.
    """
    rows, meta = convergence_table(run_dirs)
    out = out_dir if out_dir is not None else os.path.join(
        run_dirs[0], "report")
    os.makedirs(out, exist_ok=True)
    md_path = os.path.join(out, "convergence.md")
    with open(md_path, "w", encoding="utf-8") as fh:
        fh.write(convergence_markdown(rows, meta))
    png_path = os.path.join(out, "convergence.png")
    convergence_plot(rows, meta, png_path)
    return [md_path, png_path]
