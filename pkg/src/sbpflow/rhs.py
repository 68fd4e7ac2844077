"""Interior semi-discrete tendencies: split advection, viscous terms, divergence.

Advection uses the energy-consistent split form
    -1/2 [ D_j (u_j phi_k) + u_j D_j phi_k ],  k = 0, 1, 2,
whose P-weighted pairing with the state telescopes to a pure boundary
quadrature. Viscous terms enter rows 1, 2 as (1/phi0) D_j S_ij with
S_ij = tau*_ij - delta_ij p; the pressure-gradient part is kept separate so
the constraint solver can treat it as the linear map it is.
"""

from __future__ import annotations

import numpy as np

from .fields import StateField, StressField


def advective_rhs(state: StateField, ops, coeffs=None) -> np.ndarray:
    """Split-form advection tendencies for rows 0..2.

    coeffs optionally overrides the advecting velocity (u1, u2); the default
    uses the state's own velocity. Returns a (3, nx, ny) array.
    """
    if coeffs is None:
        inv0 = 1.0 / state.phi0
        u1 = state.phi1 * inv0
        u2 = state.phi2 * inv0
    else:
        u1, u2 = coeffs
    out = np.empty((3,) + state.shape)
    for k in range(3):
        phik = state.data[k]
        out[k] = -0.5 * (
            ops.dx(u1 * phik) + u1 * ops.dx(phik)
            + ops.dy(u2 * phik) + u2 * ops.dy(phik)
        )
    return out


def viscous_rhs(state: StateField, ops, stress: StressField) -> np.ndarray:
    """Deviatoric-stress divergence, rows 1 and 2 of a (3, nx, ny) array."""
    out = np.zeros((3,) + state.shape)
    out[1] = stress.inv0 * (ops.dx(stress.t11) + ops.dy(stress.t12))
    out[2] = stress.inv0 * (ops.dx(stress.t12) + ops.dy(stress.t22))
    return out


def pressure_gradient_rhs(inv0: np.ndarray, ops, p: np.ndarray) -> np.ndarray:
    """Pressure-gradient part of the momentum tendencies (linear in p)."""
    out = np.zeros((3,) + p.shape)
    out[1] = -inv0 * ops.dx(p)
    out[2] = -inv0 * ops.dy(p)
    return out


def divergence_residual(u1: np.ndarray, u2: np.ndarray, ops) -> np.ndarray:
    """Plain discrete divergence D_1 u1 + D_2 u2."""
    return ops.dx(u1) + ops.dy(u2)


def forcing_rhs(inv0: np.ndarray, f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    """Body force density (f1, f2) mapped into the square-root rows."""
    out = np.zeros((3,) + f1.shape)
    out[1] = inv0 * f1
    out[2] = inv0 * f2
    return out
