"""State representation and constitutive relations for the one-fluid model.

The solver evolves the square-root variables
    phi0 = sqrt(rho), phi1 = sqrt(rho) u1, phi2 = sqrt(rho) u2, phi3 = p,
with the mixture density rho = alpha rho_l + (1 - alpha) rho_g and the
viscosity mixed the same way. phi3 carries the pressure; it is algebraic, not
time-integrated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# phi0 below this multiple of sqrt(rho_g) aborts the run: the variable change
# divides by phi0 everywhere.
POSITIVITY_FLOOR = 1e-8


class PositivityError(RuntimeError):
    """Raised when density data or evolved phi0 leaves the admissible range."""


@dataclass(frozen=True)
class FluidPair:
    """Material constants of the liquid and gas phases."""

    rho_l: float
    rho_g: float
    mu_l: float = 0.0
    mu_g: float = 0.0

    def __post_init__(self):
        if self.rho_l <= 0.0 or self.rho_g <= 0.0:
            raise ValueError(f"phase densities must be positive, got {self.rho_l}, {self.rho_g}")
        if self.mu_l < 0.0 or self.mu_g < 0.0:
            raise ValueError(f"phase viscosities must be nonnegative, got {self.mu_l}, {self.mu_g}")
        if self.rho_l == self.rho_g and self.mu_l != self.mu_g:
            # alpha is invisible in sqrt(rho) variables when densities match,
            # so a viscosity contrast would be unrecoverable
            raise ValueError("equal-density pair requires equal viscosities")

    def density(self, alpha: np.ndarray) -> np.ndarray:
        return alpha * self.rho_l + (1.0 - alpha) * self.rho_g

    def viscosity(self, alpha: np.ndarray) -> np.ndarray:
        return alpha * self.mu_l + (1.0 - alpha) * self.mu_g

    def alpha_of_density(self, rho: np.ndarray) -> np.ndarray:
        if self.rho_l == self.rho_g:
            return np.zeros_like(rho)
        return (rho - self.rho_g) / (self.rho_l - self.rho_g)


@dataclass
class StateField:
    """Solution fields on the grid, stored as one (4, nx, ny) array."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[0] != 4:
            raise ValueError(f"state array must have shape (4, nx, ny), got {self.data.shape}")

    @classmethod
    def zeros(cls, nx: int, ny: int) -> "StateField":
        return cls(np.zeros((4, nx, ny)))

    @property
    def phi0(self) -> np.ndarray:
        return self.data[0]

    @property
    def phi1(self) -> np.ndarray:
        return self.data[1]

    @property
    def phi2(self) -> np.ndarray:
        return self.data[2]

    @property
    def phi3(self) -> np.ndarray:
        return self.data[3]

    @property
    def shape(self):
        return self.data.shape[1:]

    def copy(self) -> "StateField":
        return StateField(self.data.copy())

    def velocity(self):
        inv0 = 1.0 / self.data[0]
        return self.data[1] * inv0, self.data[2] * inv0


def primitives_to_state(rho, u1, u2, p) -> StateField:
    """Pack primitive fields into square-root variables.

    Rejects non-positive density with the offending node location, since
    sqrt(rho) and the 1/phi0 factors are meaningless there.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        ix, iy = np.unravel_index(int(np.argmin(rho)), rho.shape)
        raise PositivityError(
            f"non-positive density {rho[ix, iy]!r} at node ({ix}, {iy})"
        )
    phi0 = np.sqrt(rho)
    return StateField(np.stack([phi0, phi0 * u1, phi0 * u2, np.broadcast_to(np.asarray(p, dtype=float), rho.shape).copy()]))


def state_to_primitives(state: StateField):
    rho = state.phi0 ** 2
    u1, u2 = state.velocity()
    return rho, u1, u2, state.phi3.copy()


def alpha_of(state: StateField, fluids: FluidPair) -> np.ndarray:
    """Volume fraction recovered from phi0; zeros for an equal-density pair."""
    return fluids.alpha_of_density(state.phi0 ** 2)


def check_positivity(state: StateField, fluids: FluidPair) -> None:
    floor = POSITIVITY_FLOOR * np.sqrt(fluids.rho_g)
    phi0 = state.phi0
    if np.any(phi0 < floor):
        ix, iy = np.unravel_index(int(np.argmin(phi0)), phi0.shape)
        raise PositivityError(
            f"phi0={phi0[ix, iy]!r} below positivity floor {floor!r} at node ({ix}, {iy})"
        )


@dataclass
class StressField:
    """Deviatoric stress tau*_ij = mu (u_i,j + u_j,i) plus cached gradients.

    The cached velocity gradients are reused by the energy budget and the
    penalty terms so every consumer pairs exactly the same discrete arrays.
    """

    t11: np.ndarray
    t12: np.ndarray
    t22: np.ndarray
    mu: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    inv0: np.ndarray
    u1x: np.ndarray
    u1y: np.ndarray
    u2x: np.ndarray
    u2y: np.ndarray

    @property
    def div_u(self) -> np.ndarray:
        return self.u1x + self.u2y


def compute_stress(state: StateField, ops, fluids: FluidPair) -> StressField:
    """Velocity gradients and deviatoric stress for the current state."""
    check_positivity(state, fluids)
    inv0 = 1.0 / state.phi0
    u1 = state.phi1 * inv0
    u2 = state.phi2 * inv0
    mu = fluids.viscosity(alpha_of(state, fluids))
    u1x = ops.dx(u1)
    u1y = ops.dy(u1)
    u2x = ops.dx(u2)
    u2y = ops.dy(u2)
    return StressField(
        t11=2.0 * mu * u1x,
        t12=mu * (u1y + u2x),
        t22=2.0 * mu * u2y,
        mu=mu,
        u1=u1,
        u2=u2,
        inv0=inv0,
        u1x=u1x,
        u1y=u1y,
        u2x=u2x,
        u2y=u2y,
    )
