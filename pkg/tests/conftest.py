"""Shared builders: smooth random fields and small ready-made problems."""

import numpy as np
import pytest

from sbpflow.boundary import BoundaryData, EdgeCondition, edge_geometries, target_edge_data
from sbpflow.fields import FluidPair, primitives_to_state
from sbpflow.problem import Problem
from sbpflow.sbp import Grid2D, TensorOps2D


def smooth_field(grid, rng, amp=1.0, kmax=3, zero_edges=False):
    """Random low-wavenumber field, sized by amp.

    zero_edges uses sine products only, so the trace vanishes on the whole
    boundary; otherwise cosine mixes keep the edges alive.
    """
    X, Y = grid.mesh()
    xh = (X - grid.x0) / (grid.x1 - grid.x0)
    yh = (Y - grid.y0) / (grid.y1 - grid.y0)
    out = np.zeros_like(X)
    for k in range(1, kmax + 1):
        for l in range(1, kmax + 1):
            c = rng.standard_normal() / (k * k + l * l)
            if zero_edges:
                out += c * np.sin(np.pi * k * xh) * np.sin(np.pi * l * yh)
            else:
                out += c * np.cos(np.pi * k * xh) * np.cos(np.pi * l * yh)
                out += (rng.standard_normal() / (k * k + l * l)
                        ) * np.sin(np.pi * k * xh) * np.cos(np.pi * l * yh)
    return amp * out


def random_state(ops, fluids, rng, u_amp=0.1, p_amp=0.05):
    """Two-phase state with smooth alpha in (0, 1) and smooth velocities."""
    grid = ops.grid
    alpha = np.clip(0.5 + smooth_field(grid, rng, 0.4), 0.05, 0.95)
    if fluids.rho_l == fluids.rho_g:
        alpha = np.zeros_like(alpha)
    rho = fluids.density(alpha)
    u1 = smooth_field(grid, rng, u_amp)
    u2 = smooth_field(grid, rng, u_amp)
    p = smooth_field(grid, rng, p_amp)
    return primitives_to_state(rho, u1, u2, p)


def wall_problem(order=2, nx=17, ny=17, fluids=None, kappa=0.0, lx=1.0, ly=1.0):
    """All-wall box on [0, lx] x [0, ly]."""
    fluids = fluids or FluidPair(1000.0, 1.0, 1e-2, 1e-4)
    ops = TensorOps2D(Grid2D(nx, ny, 0.0, lx, 0.0, ly), order)
    bcs = {name: EdgeCondition("wall") for name in ("west", "east", "south", "north")}
    return Problem(ops=ops, fluids=fluids, bcs=bcs, kappa=kappa)


def channel_problem(order=2, nx=17, ny=17, fluids=None, kappa=0.0, data="zero",
                    rho_bg=None, u_bg=0.5, sigma0=1.0):
    """West/east in/outflow, south/north walls.

    data="zero" prescribes G = 0; data="target" builds characteristic data
    from a uniform (rho_bg, u_bg, 0, 0) target state.
    """
    fluids = fluids or FluidPair(1000.0, 1.0, 1e-2, 1e-4)
    ops = TensorOps2D(Grid2D(nx, ny), order)
    geos = edge_geometries(ops)
    bcs = {"south": EdgeCondition("wall"), "north": EdgeCondition("wall")}
    for name in ("west", "east"):
        if data == "zero":
            bd = BoundaryData(geos[name].b.shape[0])
        else:
            rho = rho_bg if rho_bg is not None else fluids.rho_g
            bd = target_edge_data(geos[name], fluids, rho, u_bg, 0.0, 0.0)
        bcs[name] = EdgeCondition("auto", bd)
    return Problem(ops=ops, fluids=fluids, bcs=bcs, kappa=kappa, sigma0=sigma0)


def channel_state(problem, rng, u_bg=0.5, u_amp=0.1, p_amp=0.05, rho_bg=None):
    """Through-flow state for a channel problem: background u1 plus smoothness."""
    ops = problem.ops
    fluids = problem.fluids
    grid = ops.grid
    alpha = np.clip(0.5 + smooth_field(grid, rng, 0.4), 0.05, 0.95)
    if fluids.rho_l == fluids.rho_g:
        alpha = np.zeros_like(alpha)
    rho = fluids.density(alpha) if rho_bg is None else np.full(grid.mesh()[0].shape, rho_bg)
    u1 = u_bg + smooth_field(grid, rng, u_amp)
    u2 = smooth_field(grid, rng, u_amp, zero_edges=True)
    p = smooth_field(grid, rng, p_amp)
    return primitives_to_state(rho, u1, u2, p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance pass/fail lines after the captured-output phase."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
