"""Runtime energy accounting: every term of the discrete energy rate.

The semi-discrete scheme satisfies, term by term and to round-off,

  dE/dt + dissipation + bt_advective + bt_viscous
        - sat_energy - constraint_work - forcing_work = 0

where E = sum pp (phi0^2 + phi1^2 + phi2^2), dE/dt is evaluated through the
assembled tendencies (never finite-differenced), the boundary quadratures use
the same edge samples as the penalties, and constraint_work = 2 p^T P (div u)
is repaid by the pressure closure. The budget is evaluated at every stage and
optionally asserted at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import boundary_energy_quadrature, edge_geometries, edge_values, rotate_to_normal


class IdentityError(RuntimeError):
    """Raised in assert mode when the energy-rate identity is violated."""


@dataclass(frozen=True)
class EnergyBudget:
    """One evaluation of the discrete energy-rate identity."""

    t: float
    energy: float
    dE_dt: float
    dissipation: float
    bt_advective: float
    bt_viscous: float
    sat_energy: float
    constraint_work: float
    forcing_work: float
    residual: float

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.dE_dt), self.dissipation, abs(self.bt_advective),
                   abs(self.bt_viscous), abs(self.sat_energy),
                   abs(self.constraint_work), abs(self.forcing_work))

    def check(self, tol: float = 1e-11) -> None:
        if not np.isfinite(self.residual) or abs(self.residual) > tol * self.scale:
            raise IdentityError(
                f"energy identity violated at t={self.t!r}: residual {self.residual:.3e} "
                f"exceeds {tol:.1e} * scale {self.scale:.3e}"
            )


def energy_norm(state, ops) -> float:
    """E = sum pp (phi0^2 + phi1^2 + phi2^2) = integral of rho (1 + |u|^2)."""
    d = state.data
    return float(np.sum(ops.pp * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2])))


def constraint_monitor(stress, ops) -> float:
    """P-weighted norm of the plain discrete divergence."""
    return ops.quad_norm(stress.div_u)


def energy_budget(bundle, problem, tol=None) -> EnergyBudget:
    """Evaluate every identity term from one assembled right-hand side."""
    ops = problem.ops
    pp = ops.pp
    state = bundle.state
    stress = bundle.stress
    d = state.data
    F = bundle.F

    energy = float(np.sum(pp * (d[0] ** 2 + d[1] ** 2 + d[2] ** 2)))
    dE_dt = 2.0 * float(np.sum(pp * (d[0] * F[0] + d[1] * F[1] + d[2] * F[2])))
    dissipation = 2.0 * float(np.sum(pp * (
        stress.u1x * stress.t11
        + (stress.u1y + stress.u2x) * stress.t12
        + stress.u2y * stress.t22
    )))
    bts = boundary_energy_quadrature(state, stress, bundle.p, ops)
    bt_advective = sum(v["bt_advective"] for v in bts.values())
    bt_viscous = sum(v["bt_viscous"] for v in bts.values())
    s = bundle.sat_rows
    sat_energy = 2.0 * float(np.sum(pp * (d[0] * s[0] + d[1] * s[1] + d[2] * s[2])))
    constraint_work = 2.0 * float(np.sum(pp * bundle.p * bundle.div_u))
    if bundle.forcing is None:
        forcing_work = 0.0
    else:
        f1, f2 = bundle.forcing
        forcing_work = 2.0 * float(np.sum(pp * (stress.u1 * f1 + stress.u2 * f2)))
    residual = (dE_dt + dissipation + bt_advective + bt_viscous
                - sat_energy - constraint_work - forcing_work)
    budget = EnergyBudget(
        t=bundle.t, energy=energy, dE_dt=dE_dt, dissipation=dissipation,
        bt_advective=bt_advective, bt_viscous=bt_viscous, sat_energy=sat_energy,
        constraint_work=constraint_work, forcing_work=forcing_work, residual=residual,
    )
    if tol is not None:
        budget.check(tol)
    return budget


def sat_energy_full(state, sat_fields, ops) -> float:
    """Penalty energy including the constraint-row pairing 2 p^T P SAT_3."""
    d = state.data
    s = sat_fields
    return 2.0 * float(np.sum(ops.pp * (
        d[0] * s[0] + d[1] * s[1] + d[2] * s[2] + d[3] * s[3]
    )))


def wall_edge_energy(state, stress, problem, edge: str, pfield):
    """Boundary-term and full penalty energies of one wall edge.

    Exact cancellation (bt == sat) for arbitrary states is the wall design
    property; the constraint-row pairing supplies the pressure-work part.
    """
    from .boundary import assemble_sats

    sat = assemble_sats(state, stress, problem, 0.0, pfield=pfield, edges=(edge,))
    bts = boundary_energy_quadrature(state, stress, pfield, problem.ops)[edge]
    bt_total = bts["bt_advective"] + bts["bt_viscous"]
    sat_full = sat_energy_full(
        StateWithPressure(state, pfield), sat.fields, problem.ops
    )
    return bt_total, sat_full


class StateWithPressure:
    """State view with the pressure row replaced (budget helper)."""

    def __init__(self, state, pfield):
        self.data = np.stack([state.data[0], state.data[1], state.data[2], pfield])


@dataclass(frozen=True)
class MassReport:
    t: float
    total_mass: float
    boundary_flux: float  # outward rho u_n quadrature
    drift: float  # mass(t) - mass(0) + integrated flux


def total_mass(state, ops) -> float:
    return float(np.sum(ops.pp * state.phi0 ** 2))


def boundary_mass_flux(state, stress, ops) -> float:
    """Outward mass flux quadrature sum_edges sum b rho u_n."""
    flux = 0.0
    for geo in edge_geometries(ops).values():
        rho_e = edge_values(state.phi0, geo) ** 2
        un, _ = rotate_to_normal(
            edge_values(stress.u1, geo), edge_values(stress.u2, geo), geo.n1, geo.n2
        )
        flux += float(np.sum(geo.b * rho_e * un))
    return flux
