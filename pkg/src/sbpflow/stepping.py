"""Time integration: full right-hand-side assembly and classical RK4.

The pressure is algebraic: it is re-solved at every stage from the constraint
condition, so only rows 0..2 are integrated. The preconditioner factorization
is lagged across stages and refreshed adaptively; every stage still solves its
own linear system to the residual contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import boundary
from .fields import StateField, alpha_of, compute_stress
from .pressure import PressureInfo, PressureWorkspace, solve_pressure
from .rhs import advective_rhs, forcing_rhs, pressure_gradient_rhs, viscous_rhs


@dataclass
class TimeControls:
    """Step-size policy and integrator selection."""

    dt: float = 0.0  # fixed step when dt_mode == "fixed"
    t_end: float = 1.0
    cfl: float = 0.4
    dt_mode: str = "cfl"
    dt_max: float = 1.0
    max_steps: int = 10_000_000
    rk_scheme: str = "rk4"

    def __post_init__(self):
        if self.dt_mode not in ("cfl", "fixed"):
            raise ValueError(f"dt_mode must be 'cfl' or 'fixed', got {self.dt_mode!r}")
        if self.rk_scheme != "rk4":
            raise ValueError(f"unsupported rk_scheme {self.rk_scheme!r}")
        if self.dt_mode == "fixed" and self.dt <= 0.0:
            raise ValueError(f"fixed dt must be positive, got {self.dt}")
        if self.dt_mode == "cfl" and not (0.0 < self.cfl <= 2.0):
            raise ValueError(f"cfl must lie in (0, 2], got {self.cfl}")
        if self.dt_max <= 0.0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if self.t_end < 0.0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be positive, got {self.max_steps}")


def stable_dt(state: StateField, problem, tc: TimeControls) -> float:
    """Advective + viscous explicit step bound.

    dt = cfl / [ max|u1|/hx + max|u2|/hy + 2 max(mu/rho) (1/hx^2 + 1/hy^2) ],
    falling back to dt_max when all wavespeeds vanish.
    """
    g = problem.ops.grid
    u1, u2 = state.velocity()
    mu = problem.fluids.viscosity(alpha_of(state, problem.fluids))
    nu_max = float(np.max(mu / state.phi0 ** 2))
    denom = (float(np.max(np.abs(u1))) / g.hx
             + float(np.max(np.abs(u2))) / g.hy
             + 2.0 * nu_max * (1.0 / g.hx ** 2 + 1.0 / g.hy ** 2))
    if denom == 0.0:
        return tc.dt_max
    return min(tc.cfl / denom, tc.dt_max)


@dataclass
class RhsBundle:
    """One assembled right-hand side plus everything the budget pairs with."""

    t: float
    state: StateField
    F: np.ndarray  # (3, nx, ny), total tendencies
    p: np.ndarray
    sat_rows: np.ndarray  # (3, nx, ny) penalty tendencies incl. pressure response
    sat3: np.ndarray  # constraint-row penalty incl. pressure response
    div_u: np.ndarray
    stress: object
    forcing: tuple | None
    gg_quadrature: float
    pressure_info: PressureInfo

    @property
    def constraint_residual(self) -> np.ndarray:
        return self.div_u - self.sat3


def rhs_full(state: StateField, t: float, problem, ws: PressureWorkspace,
             *, reuse_precond: bool = True) -> RhsBundle:
    """Assemble tendencies with the constraint-consistent pressure."""
    ops = problem.ops
    stress = compute_stress(state, ops, problem.fluids)
    sat = boundary.assemble_sats(state, stress, problem, t)
    F_base = advective_rhs(state, ops) + viscous_rhs(state, ops, stress) + sat.fields[:3]
    forcing = None
    if problem.forcing is not None:
        forcing = problem.forcing(t)
        F_base = F_base + forcing_rhs(stress.inv0, forcing[0], forcing[1])
    p, info = solve_pressure(stress, sat, problem, F_base, stress.div_u, ws,
                             reuse=reuse_precond)
    dsat = boundary.sat_pressure_response(sat, problem, stress.inv0, p)
    F = F_base + pressure_gradient_rhs(stress.inv0, ops, p) + dsat[:3]
    return RhsBundle(
        t=t, state=state, F=F, p=p,
        sat_rows=sat.fields[:3] + dsat[:3],
        sat3=sat.fields[3] + dsat[3],
        div_u=stress.div_u, stress=stress, forcing=forcing,
        gg_quadrature=sat.gg_quadrature, pressure_info=info,
    )


def rk4_step(y, t, dt, f):
    """Classical fourth-order step for dy/dt = f(t, y) on plain arrays."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(state: StateField, t: float, dt: float, problem, ws: PressureWorkspace):
    """Advance one RK4 step; returns the new state and the 4 stage bundles."""
    y0 = state.data[:3]
    phi3 = state.data[3]

    def stage(ts, y):
        s = StateField(np.concatenate([y, phi3[None]], axis=0))
        return rhs_full(s, ts, problem, ws)

    b1 = stage(t, y0)
    b2 = stage(t + 0.5 * dt, y0 + (0.5 * dt) * b1.F)
    b3 = stage(t + 0.5 * dt, y0 + (0.5 * dt) * b2.F)
    b4 = stage(t + dt, y0 + dt * b3.F)
    y1 = y0 + (dt / 6.0) * (b1.F + 2.0 * b2.F + 2.0 * b3.F + b4.F)
    out = StateField(np.concatenate([y1, b4.p[None]], axis=0))
    return out, (b1, b2, b3, b4)
