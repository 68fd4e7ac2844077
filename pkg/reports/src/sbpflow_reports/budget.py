"""Energy-budget figures for a single run directory.

All figures are rendered with the Agg backend at a fixed dpi and saved
without a creation date, so regenerating from the same inputs reproduces
the PNG bytes exactly.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import load_run, run_label

DPI = 150
# Stripping the Date chunk keeps PNG output byte-stable across reruns.
SAVE_KW = {"dpi": DPI, "metadata": {"Date": None}}

BUDGET_TERMS = [
    ("dE_dt", "dE/dt"),
    ("dissipation", "dissipation"),
    ("bt_advective", "advective boundary term"),
    ("bt_viscous", "viscous boundary term"),
    ("sat_energy", "SAT energy rate"),
]


def _cumtrapz(y, t):
    """Cumulative trapezoid integral of y(t), starting at zero."""
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def _log_floor(arrays):
    """Positive plotting floor so exact zeros survive a log axis."""
    peak = max(float(np.abs(a).max()) for a in arrays)
    return peak * 1e-18 if peak > 0.0 else 1e-20


def _energy_figure(series, label, path):
    t = series["t"]
    energy = series["energy"]
    # dE/dt + dissipation is the net power entering through the boundary,
    # so E(0) plus its integral is an upper envelope for E(t) whenever the
    # interior terms dissipate. With zero boundary data it stays at E(0).
    envelope = energy[0] + _cumtrapz(series["dE_dt"] + series["dissipation"], t)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(t, energy, color="tab:blue", label="E(t)")
    ax.plot(t, envelope, color="tab:orange", linestyle="--",
            label="E(0) + integrated boundary input")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.set_title(f"Energy: {label}")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **SAVE_KW)
    plt.close(fig)


def _budget_figure(series, label, path):
    t = series["t"]
    keys = [key for key, _ in BUDGET_TERMS] + ["residual"]
    floor = _log_floor([series[key] for key in keys])
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    for key, name in BUDGET_TERMS:
        ax.semilogy(t, np.maximum(np.abs(series[key]), floor),
                    label=f"|{name}|", linewidth=1.0)
    ax.semilogy(t, np.maximum(np.abs(series["residual"]), floor),
                color="black", linewidth=1.6, label="|residual|")
    ax.set_xlabel("t")
    ax.set_ylabel("magnitude")
    ax.set_title(f"Budget terms: {label}")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **SAVE_KW)
    plt.close(fig)


def _constraint_figure(series, label, path):
    t = series["t"]
    norm = np.abs(series["constraint_norm"])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(t, np.maximum(norm, _log_floor([norm])), color="tab:red")
    ax.set_xlabel("t")
    ax.set_ylabel("constraint norm")
    ax.set_title(f"Divergence constraint: {label}")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **SAVE_KW)
    plt.close(fig)


def _summary_markdown(series, report, label, figures):
    lines = [f"# Run summary: {label}", ""]
    lines.append(f"Rows in timeseries: {len(series['t'])}")
    lines.append("")
    lines.append("| key | value |")
    lines.append("| --- | --- |")
    for key, val in report.items():
        lines.append(f"| {key} | {val} |")
    lines.append("")
    if figures:
        lines.append("Figures: " + ", ".join(os.path.basename(p)
                                             for p in figures))
        lines.append("")
    return "\n".join(lines)


def plot_energy_budget(run_dir, out_dir=None, energy=True, budget=True,
                       constraint=True):
    """Render the energy figures and markdown summary for one run.

    Writes into out_dir (default <run_dir>/report/) and returns the list
    of paths written. The run directory itself is never modified beyond
    that subdirectory.
    """
    series, report = load_run(run_dir)
    label = run_label(report)
    out = out_dir if out_dir is not None else os.path.join(run_dir, "report")
    os.makedirs(out, exist_ok=True)
    written = []
    if energy:
        path = os.path.join(out, "energy.png")
        _energy_figure(series, label, path)
        written.append(path)
    if budget:
        path = os.path.join(out, "budget.png")
        _budget_figure(series, label, path)
        written.append(path)
    if constraint:
        path = os.path.join(out, "constraint.png")
        _constraint_figure(series, label, path)
        written.append(path)
    md_path = os.path.join(out, "summary.md")
    with open(md_path, "w", encoding="utf-8") as fh:
        fh.write(_summary_markdown(series, report, label, written))
    written.append(md_path)
    return written
