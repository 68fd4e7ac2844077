"""End-to-end run driver: scenario setup, time loop, output files."""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryData, EdgeCondition, edge_geometries
from .config import RunConfig, format_config
from .diagnostics import (boundary_mass_flux, constraint_monitor, energy_budget,
                          total_mass)
from .fields import FluidPair, alpha_of, check_positivity
from .pressure import PressureWorkspace, project_state
from .problem import Problem
from .runio import ensure_dir, write_report, write_snapshot, write_timeseries
from .sbp import Grid2D, TensorOps2D
from .scenarios import init_scenario
from .stepping import TimeControls, rhs_full, stable_dt, step

ALPHA_BAND = 1e-6  # tolerated overshoot outside [0, 1] before counting a warning


@dataclass
class RunResult:
    out_dir: str
    steps: int
    t_final: float
    rows: list
    final_state: object
    problem: object
    report: dict = field(default_factory=dict)


def build_problem(cfg: RunConfig):
    """Construct (problem, initial state, scenario extras) from a config."""
    grid = Grid2D(cfg.grid.nx, cfg.grid.ny, cfg.grid.x0, cfg.grid.x1,
                  cfg.grid.y0, cfg.grid.y1)
    ops = TensorOps2D(grid, cfg.order)
    fluids = FluidPair(cfg.fluids.rho_l, cfg.fluids.rho_g,
                       cfg.fluids.mu_l, cfg.fluids.mu_g)
    scen = init_scenario(cfg.scenario_name, ops, fluids, cfg.scenario_params)
    bcs = dict(scen.bcs)
    geos = edge_geometries(ops)
    for edge, ov in cfg.bc_overrides.items():
        kind = bcs[edge].kind if ov.kind == "scenario" else ov.kind
        if ov.data == "zero":
            data = BoundaryData(geos[edge].b.shape[0])
        else:
            data = bcs[edge].data
        bcs[edge] = EdgeCondition(kind, data)
    problem = Problem(
        ops=ops, fluids=fluids, bcs=bcs,
        sigma0=cfg.run.sigma0, sigma1=cfg.run.sigma1, sigma2=cfg.run.sigma2,
        kappa=cfg.run.kappa, forcing=scen.forcing,
    )
    return problem, scen.state, scen.exact


def _time_controls(cfg: RunConfig) -> TimeControls:
    t = cfg.time
    return TimeControls(dt=t.dt, t_end=t.t_end, cfl=t.cfl, dt_mode=t.dt_mode,
                        dt_max=t.dt_max, max_steps=t.max_steps,
                        rk_scheme=t.rk_scheme)


def _budget_row(budget, bundle, state, problem):
    ops = problem.ops
    alpha = alpha_of(state, problem.fluids)
    return {
        "t": budget.t,
        "energy": budget.energy,
        "dE_dt": budget.dE_dt,
        "dissipation": budget.dissipation,
        "bt_advective": budget.bt_advective,
        "bt_viscous": budget.bt_viscous,
        "sat_energy": budget.sat_energy,
        "residual": budget.residual,
        "constraint_norm": constraint_monitor(bundle.stress, ops),
        "total_mass": total_mass(state, ops),
        "alpha_min": float(alpha.min()),
        "alpha_max": float(alpha.max()),
    }


def run(cfg: RunConfig, out_dir=None, assert_mode=None, order=None) -> RunResult:
    """Run a configured scenario to t_end, writing CSV outputs and a report."""
    cfg = copy.deepcopy(cfg)
    if out_dir is not None:
        cfg.output.dir = out_dir
    if assert_mode is not None:
        cfg.run.assert_mode = assert_mode
    if order is not None:
        cfg.order = order

    problem, state, extras = build_problem(cfg)
    tc = _time_controls(cfg)
    ws = PressureWorkspace()
    if cfg.run.project:
        state = project_state(state, problem, t=0.0)
    check_positivity(state, problem.fluids)

    out = ensure_dir(cfg.output.dir)
    with open(os.path.join(out, "config.echo"), "w", encoding="utf-8") as fh:
        fh.write(format_config(cfg))

    tol = cfg.run.assert_tol
    check_tol = tol if cfg.run.assert_mode else None
    rows = []
    fluxes = []  # (t, outward mass flux) for drift integration
    t = 0.0
    n_steps = 0
    max_res_scale = 0.0
    max_constraint = 0.0
    max_iters = 0
    refreshes = 0
    alpha_warnings = 0
    every = cfg.output.snapshot_every
    snap_written = set()

    def snapshot(tag, st, tnow):
        if tag in snap_written:
            return
        snap_written.add(tag)
        path = os.path.join(out, f"snapshot_{tag:06d}.csv")
        write_snapshot(path, st, problem.fluids, problem.ops.grid, cfg.order,
                       tnow, tag)

    def track(budget, bundle):
        nonlocal max_res_scale, max_constraint, max_iters, refreshes
        max_res_scale = max(max_res_scale, abs(budget.residual) / budget.scale)
        max_constraint = max(max_constraint,
                             constraint_monitor(bundle.stress, problem.ops))
        max_iters = max(max_iters, bundle.pressure_info.iterations)
        refreshes += int(bundle.pressure_info.refreshed)

    snapshot(0, state, 0.0)
    t_end = tc.t_end
    tiny = 1e-12 * max(1.0, t_end)
    while t < t_end - tiny and n_steps < tc.max_steps:
        dt = tc.dt if tc.dt_mode == "fixed" else stable_dt(state, problem, tc)
        dt = min(dt, t_end - t)
        state_new, bundles = step(state, t, dt, problem, ws)
        budgets = [energy_budget(b, problem, tol=check_tol) for b in bundles]
        for bud, b in zip(budgets, bundles):
            track(bud, b)
        row = _budget_row(budgets[0], bundles[0], state, problem)
        rows.append(row)
        fluxes.append((t, boundary_mass_flux(state, bundles[0].stress, problem.ops)))
        if row["alpha_min"] < -ALPHA_BAND or row["alpha_max"] > 1.0 + ALPHA_BAND:
            alpha_warnings += 1
        check_positivity(state_new, problem.fluids)
        t += dt
        n_steps += 1
        state = state_new
        if every and n_steps % every == 0 and t < t_end - tiny:
            snapshot(n_steps, state, t)

    final_bundle = rhs_full(state, t, problem, ws)
    final_budget = energy_budget(final_bundle, problem, tol=check_tol)
    track(final_budget, final_bundle)
    row = _budget_row(final_budget, final_bundle, state, problem)
    rows.append(row)
    fluxes.append((t, boundary_mass_flux(state, final_bundle.stress, problem.ops)))
    if row["alpha_min"] < -ALPHA_BAND or row["alpha_max"] > 1.0 + ALPHA_BAND:
        alpha_warnings += 1
    snapshot(n_steps, state, t)

    write_timeseries(os.path.join(out, "timeseries.csv"), rows)

    mass0 = rows[0]["total_mass"]
    mass1 = rows[-1]["total_mass"]
    flux_int = 0.0
    for (ta, fa), (tb, fb) in zip(fluxes[:-1], fluxes[1:]):
        flux_int += 0.5 * (fa + fb) * (tb - ta)
    mass_drift = mass1 - mass0 + flux_int

    entries = [
        ("scenario", cfg.scenario_name),
        ("order", cfg.order),
        ("nx", cfg.grid.nx),
        ("ny", cfg.grid.ny),
        ("steps", n_steps),
        ("t_final", t),
        ("energy_initial", rows[0]["energy"]),
        ("energy_final", rows[-1]["energy"]),
        ("max_abs_residual_over_scale", max_res_scale),
        ("constraint_norm_max", max_constraint),
        ("alpha_min_global", min(r["alpha_min"] for r in rows)),
        ("alpha_max_global", max(r["alpha_max"] for r in rows)),
        ("alpha_warnings", alpha_warnings),
        ("mass_initial", mass0),
        ("mass_final", mass1),
        ("mass_drift", mass_drift),
        ("gmres_max_iterations", max_iters),
        ("precond_refreshes", refreshes),
        ("identity_checked", "true" if cfg.run.assert_mode else "false"),
    ]
    entries.extend(_error_entries(state, extras, problem, t))
    write_report(os.path.join(out, "report.txt"), entries)

    return RunResult(out_dir=out, steps=n_steps, t_final=t, rows=rows,
                     final_state=state, problem=problem,
                     report={k: v for k, v in entries})


def _error_entries(state, extras, problem, t):
    """Analytic-reference error lines for scenarios that carry one."""
    ops = problem.ops
    entries = []
    if "u1" in extras:
        u1, u2 = state.velocity()
        e1 = ops.quad_norm(u1 - extras["u1"])
        e2 = ops.quad_norm(u2 - extras["u2"])
        p = state.phi3
        pex = extras["p"]
        w = ops.pp / np.sum(ops.pp)
        dp = (p - np.sum(w * p)) - (pex - np.sum(w * pex))
        entries.extend([
            ("l2_error_u1", e1),
            ("l2_error_u2", e2),
            ("l2_error_u", float(np.hypot(e1, e2))),
            ("l2_error_p", ops.quad_norm(dp)),
            ("grid_h", max(ops.grid.hx, ops.grid.hy)),
        ])
    if "alpha_exact" in extras:
        alpha = alpha_of(state, problem.fluids)
        err = np.abs(alpha - extras["alpha_exact"](t))
        entries.append(("alpha_error_linf", float(err.max())))
    return entries
