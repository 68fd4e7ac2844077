"""Initial states, boundary data, and forcing for the shipped scenarios.

Every scenario returns the initial state, the edge conditions with matching
characteristic data, an optional body force, and any analytic reference
fields used by error reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryData, EdgeCondition, edge_geometries, target_edge_data
from .fields import FluidPair, StateField, primitives_to_state
from .sbp import TensorOps2D


class ScenarioError(ValueError):
    """Bad scenario name or parameters."""


@dataclass
class ScenarioResult:
    state: StateField
    bcs: dict
    forcing: object = None  # callable t -> (f1, f2) or None
    exact: dict = field(default_factory=dict)


def _params(params, defaults, name):
    out = dict(defaults)
    for key, val in params.items():
        if key not in defaults:
            raise ScenarioError(f"unknown parameter {key!r} for scenario {name!r}")
        out[key] = type(defaults[key])(val)
    return out


def _quiescent_box(ops: TensorOps2D, fluids: FluidPair, params) -> ScenarioResult:
    p = _params(params, {
        "alpha_bottom": 1.0, "alpha_top": 0.0,
        "interface_y": float("nan"), "interface_width": 0.1,
    }, "quiescent-box")
    X, Y = ops.grid.mesh()
    if np.isnan(p["interface_y"]):
        alpha = np.full(X.shape, p["alpha_bottom"])
    else:
        w = max(p["interface_width"], 1e-12)
        alpha = p["alpha_top"] + (p["alpha_bottom"] - p["alpha_top"]) * 0.5 * (
            1.0 - np.tanh((Y - p["interface_y"]) / w)
        )
    rho = fluids.density(alpha)
    state = primitives_to_state(rho, np.zeros_like(X), np.zeros_like(X), np.zeros_like(X))
    bcs = {name: EdgeCondition("wall") for name in ("west", "east", "south", "north")}
    return ScenarioResult(state=state, bcs=bcs)


def _advected_blob(ops: TensorOps2D, fluids: FluidPair, params) -> ScenarioResult:
    g = ops.grid
    p = _params(params, {
        "u": 1.0, "alpha_bg": 0.1, "alpha_peak": 0.9,
        "center_x": 0.5 * (g.x0 + g.x1), "center_y": 0.5 * (g.y0 + g.y1),
        "radius": 0.2 * min(g.x1 - g.x0, g.y1 - g.y0),
    }, "advected-blob")
    if p["u"] <= 0.0:
        raise ScenarioError("advected-blob requires u > 0 (west-to-east transport)")
    X, Y = g.mesh()

    def alpha_at(xc):
        q2 = ((X - xc) ** 2 + (Y - p["center_y"]) ** 2) / p["radius"] ** 2
        bump = np.where(q2 < 1.0, (1.0 - np.minimum(q2, 1.0)) ** 4, 0.0)
        return p["alpha_bg"] + (p["alpha_peak"] - p["alpha_bg"]) * bump

    alpha = alpha_at(p["center_x"])
    rho = fluids.density(alpha)
    u1 = np.full(X.shape, p["u"])
    state = primitives_to_state(rho, u1, np.zeros_like(X), np.zeros_like(X))

    geos = edge_geometries(ops)
    rho_bg = float(fluids.density(np.asarray(p["alpha_bg"])))
    data = {
        name: target_edge_data(geos[name], fluids, rho_bg, p["u"], 0.0, 0.0)
        for name in ("west", "east")
    }
    bcs = {
        "west": EdgeCondition("inflow", data["west"]),
        "east": EdgeCondition("outflow", data["east"]),
        "south": EdgeCondition("wall"),
        "north": EdgeCondition("wall"),
    }

    def alpha_exact(t):
        return alpha_at(p["center_x"] + p["u"] * t)

    return ScenarioResult(state=state, bcs=bcs, exact={"alpha_exact": alpha_exact, "u": p["u"]})


def _shear_channel(ops: TensorOps2D, fluids: FluidPair, params) -> ScenarioResult:
    g = ops.grid
    p = _params(params, {
        "u_max": 1.0, "floor": 1.0, "alpha": 1.0, "profile": "uniform",
    }, "shear-channel")
    if p["profile"] not in ("uniform", "parabolic"):
        raise ScenarioError(f"unknown channel profile {p['profile']!r}")
    if not (0.0 < p["floor"] <= 1.0):
        raise ScenarioError("channel floor must lie in (0, 1]")
    X, Y = g.mesh()
    ly = g.y1 - g.y0
    yh = (Y - g.y0) / ly

    if p["profile"] == "uniform":
        u1 = np.full(X.shape, p["u_max"])
        du1_dy = np.zeros_like(u1)
    else:
        shape_fn = p["floor"] + (1.0 - p["floor"]) * 4.0 * yh * (1.0 - yh)
        u1 = p["u_max"] * shape_fn
        du1_dy = p["u_max"] * (1.0 - p["floor"]) * 4.0 * (1.0 - 2.0 * yh) / ly

    alpha = np.full(X.shape, p["alpha"])
    rho = fluids.density(alpha)
    state = primitives_to_state(rho, u1, np.zeros_like(X), np.zeros_like(X))

    geos = edge_geometries(ops)
    rho_edge = float(fluids.density(np.asarray(p["alpha"])))
    data = {}
    for name in ("west", "east"):
        geo = geos[name]
        u1_e = u1[0, :] if name == "west" else u1[-1, :]
        dy_e = du1_dy[0, :] if name == "west" else du1_dy[-1, :]
        zeros = np.zeros_like(u1_e)
        data[name] = target_edge_data(geo, fluids, rho_edge, u1_e, 0.0, 0.0,
                                      grad=(zeros, dy_e, zeros, zeros))
    bcs = {
        "west": EdgeCondition("inflow", data["west"]),
        "east": EdgeCondition("outflow", data["east"]),
        "south": EdgeCondition("wall"),
        "north": EdgeCondition("wall"),
    }
    return ScenarioResult(state=state, bcs=bcs)


def manufactured_fields(grid, amplitude, p_amp):
    """Analytic steady vortex with velocity vanishing on the whole boundary.

    Returns a dict of arrays: u1, u2, p and the first/second derivatives
    needed to assemble the matching body force.
    """
    lx = grid.x1 - grid.x0
    ly = grid.y1 - grid.y0
    X, Y = grid.mesh()
    xh = (X - grid.x0) / lx
    yh = (Y - grid.y0) / ly
    pi = np.pi
    a = amplitude
    s2x = np.sin(pi * xh) ** 2
    s2y = np.sin(pi * yh) ** 2
    sx2 = np.sin(2.0 * pi * xh)
    sy2 = np.sin(2.0 * pi * yh)
    cx2 = np.cos(2.0 * pi * xh)
    cy2 = np.cos(2.0 * pi * yh)

    u1 = (pi * a / ly) * s2x * sy2
    u2 = -(pi * a / lx) * sx2 * s2y
    out = {
        "u1": u1,
        "u2": u2,
        "u1_x": (pi ** 2 * a / (lx * ly)) * sx2 * sy2,
        "u1_y": (2.0 * pi ** 2 * a / ly ** 2) * s2x * cy2,
        "u2_x": -(2.0 * pi ** 2 * a / lx ** 2) * cx2 * s2y,
        "u2_y": -(pi ** 2 * a / (lx * ly)) * sx2 * sy2,
        "u1_xx": (2.0 * pi ** 3 * a / (lx ** 2 * ly)) * cx2 * sy2,
        "u1_yy": -(4.0 * pi ** 3 * a / ly ** 3) * s2x * sy2,
        "u2_xx": (4.0 * pi ** 3 * a / lx ** 3) * sx2 * s2y,
        "u2_yy": -(2.0 * pi ** 3 * a / (lx * ly ** 2)) * sx2 * cy2,
        "p": p_amp * np.cos(pi * xh) * np.cos(pi * yh),
        "p_x": -(pi * p_amp / lx) * np.sin(pi * xh) * np.cos(pi * yh),
        "p_y": -(pi * p_amp / ly) * np.cos(pi * xh) * np.sin(pi * yh),
    }
    return out


def _manufactured_vortex(ops: TensorOps2D, fluids: FluidPair, params) -> ScenarioResult:
    p = _params(params, {"amplitude": 1.0, "p_amp": 0.5}, "manufactured-vortex")
    if fluids.rho_l != fluids.rho_g:
        raise ScenarioError("manufactured-vortex is single-phase: set rho_l = rho_g")
    rho0 = fluids.rho_g
    mu0 = fluids.mu_g
    f = manufactured_fields(ops.grid, p["amplitude"], p["p_amp"])
    rho = np.full(f["u1"].shape, rho0)
    state = primitives_to_state(rho, f["u1"], f["u2"], f["p"])
    f1 = rho0 * (f["u1"] * f["u1_x"] + f["u2"] * f["u1_y"]) \
        - mu0 * (f["u1_xx"] + f["u1_yy"]) + f["p_x"]
    f2 = rho0 * (f["u1"] * f["u2_x"] + f["u2"] * f["u2_y"]) \
        - mu0 * (f["u2_xx"] + f["u2_yy"]) + f["p_y"]

    def forcing(t):
        return f1, f2

    bcs = {name: EdgeCondition("wall") for name in ("west", "east", "south", "north")}
    return ScenarioResult(
        state=state, bcs=bcs, forcing=forcing,
        exact={"u1": f["u1"], "u2": f["u2"], "p": f["p"]},
    )


SCENARIOS = {
    "quiescent-box": _quiescent_box,
    "advected-blob": _advected_blob,
    "shear-channel": _shear_channel,
    "manufactured-vortex": _manufactured_vortex,
}


def init_scenario(name: str, ops: TensorOps2D, fluids: FluidPair, params=None) -> ScenarioResult:
    if name not in SCENARIOS:
        raise ScenarioError(f"unknown scenario {name!r}, expected one of {sorted(SCENARIOS)}")
    return SCENARIOS[name](ops, fluids, dict(params or {}))
