"""Summation-by-parts difference operators on 2D tensor-product grids.

Diagonal-norm first-derivative operators D = P^{-1} Q with
Q + Q^T = B = diag(-1, 0, ..., 0, 1), in families of interior order 2 and 4
(boundary closures of order 1 and 2). The 2D extension is by Kronecker
structure: fields are (nx, ny) arrays in x-major order, the x operator acts
from the left and the y operator from the right, and the quadrature is the
tensor product of the 1D norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# minimum nodes for the closure blocks not to overlap
MIN_NODES_1D = {2: 3, 4: 8}
# minimum grid extent per axis accepted by TensorOps2D
MIN_NODES_2D = {2: 4, 4: 8}


@dataclass(frozen=True)
class SbpOperator1D:
    """First-derivative SBP operator on a uniform 1D grid."""

    order: int
    n: int
    h: float
    p: np.ndarray  # quadrature weights, shape (n,)
    d: np.ndarray  # difference matrix, shape (n, n)

    @property
    def q(self) -> np.ndarray:
        """Almost-skew part Q = P D, satisfying Q + Q^T = B."""
        return self.p[:, None] * self.d

    @property
    def b(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        out[0, 0] = -1.0
        out[-1, -1] = 1.0
        return out


def _order2_blocks():
    p = np.array([0.5])
    d = np.array([[-1.0, 1.0, 0.0]])
    interior = np.array([-0.5, 0.0, 0.5])
    return p, d, interior


def _order4_blocks():
    p = np.array([17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0])
    d = np.array(
        [
            [-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0],
            [-1.0 / 2.0, 0.0, 1.0 / 2.0, 0.0, 0.0, 0.0],
            [4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0],
            [3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
        ]
    )
    interior = np.array([1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0])
    return p, d, interior


def sbp_operator(order: int, n: int, h: float) -> SbpOperator1D:
    """Build the diagonal-norm operator of the requested interior order."""
    if order not in MIN_NODES_1D:
        raise ValueError(f"unsupported SBP order {order}, expected one of {sorted(MIN_NODES_1D)}")
    if n < MIN_NODES_1D[order]:
        raise ValueError(f"order-{order} operator needs at least {MIN_NODES_1D[order]} nodes, got {n}")
    if h <= 0.0:
        raise ValueError(f"grid spacing must be positive, got {h}")

    if order == 2:
        pb, db, interior = _order2_blocks()
    else:
        pb, db, interior = _order4_blocks()
    nb = len(pb)
    width = db.shape[1]
    half = len(interior) // 2

    p = np.ones(n)
    p[:nb] = pb
    p[n - nb:] = pb[::-1]
    p *= h

    d = np.zeros((n, n))
    for i in range(nb):
        d[i, :width] = db[i]
        # mirrored closure with sign flip
        d[n - 1 - i, n - width:] = -db[i, ::-1]
    for i in range(nb, n - nb):
        d[i, i - half:i + half + 1] = interior
    d /= h

    return SbpOperator1D(order=order, n=n, h=h, p=p, d=d)


@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor-product grid on [x0, x1] x [y0, y1], x-major storage."""

    nx: int
    ny: int
    x0: float = 0.0
    x1: float = 1.0
    y0: float = 0.0
    y1: float = 1.0

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid needs at least 2 nodes per axis, got {self.nx} x {self.ny}")
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ValueError("grid extents must be increasing")

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.hx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.y0 + self.hy * np.arange(self.ny)

    def mesh(self):
        """Full coordinate arrays X, Y of shape (nx, ny)."""
        return (
            np.broadcast_to(self.x[:, None], (self.nx, self.ny)).copy(),
            np.broadcast_to(self.y[None, :], (self.nx, self.ny)).copy(),
        )


@dataclass
class TensorOps2D:
    """2D derivative and quadrature machinery for (nx, ny) fields."""

    grid: Grid2D
    order: int
    opx: SbpOperator1D = field(init=False)
    opy: SbpOperator1D = field(init=False)

    def __post_init__(self):
        lo = MIN_NODES_2D.get(self.order)
        if lo is None:
            raise ValueError(f"unsupported SBP order {self.order}")
        if self.grid.nx < lo or self.grid.ny < lo:
            raise ValueError(
                f"order-{self.order} tensor operators need at least {lo} nodes per axis, "
                f"got {self.grid.nx} x {self.grid.ny}"
            )
        self.opx = sbp_operator(self.order, self.grid.nx, self.grid.hx)
        self.opy = sbp_operator(self.order, self.grid.ny, self.grid.hy)
        self._dy_t = np.ascontiguousarray(self.opy.d.T)
        self._dy = self.opy.d
        self._dx = self.opx.d
        self._dx_t = np.ascontiguousarray(self.opx.d.T)
        self.px = self.opx.p
        self.py = self.opy.p
        self.pp = self.px[:, None] * self.py[None, :]
        self.inv_pp = 1.0 / self.pp

    # derivative applications; fields are (nx, ny)
    def dx(self, f: np.ndarray) -> np.ndarray:
        return self._dx @ f

    def dy(self, f: np.ndarray) -> np.ndarray:
        return f @ self._dy_t

    # plain transposes, used by penalty scattering
    def dx_t(self, f: np.ndarray) -> np.ndarray:
        return self._dx_t @ f

    def dy_t(self, f: np.ndarray) -> np.ndarray:
        return f @ self._dy

    def quad_inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """P-weighted inner product over the grid."""
        return float(np.sum(self.pp * u * v))

    def quad_norm(self, u: np.ndarray) -> float:
        return float(np.sqrt(max(self.quad_inner(u, u), 0.0)))

    def dense_dx(self) -> np.ndarray:
        """Kronecker-assembled x derivative on flattened x-major fields."""
        return np.kron(self.opx.d, np.eye(self.grid.ny))

    def dense_dy(self) -> np.ndarray:
        return np.kron(np.eye(self.grid.nx), self.opy.d)

    def dense_pp(self) -> np.ndarray:
        return np.diag(self.pp.reshape(-1))


def export_operator_csv(op: SbpOperator1D, path) -> None:
    """Dump P, Q, D of a 1D operator to CSV for external inspection."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["# sbp operator", f"order={op.order}", f"n={op.n}", f"h={op.h!r}"])
        w.writerow(["matrix", "row", "col", "value"])
        for j, v in enumerate(op.p):
            w.writerow(["P", j, j, repr(float(v))])
        q = op.q
        for i in range(op.n):
            for j in range(op.n):
                if q[i, j] != 0.0:
                    w.writerow(["Q", i, j, repr(float(q[i, j]))])
        for i in range(op.n):
            for j in range(op.n):
                if op.d[i, j] != 0.0:
                    w.writerow(["D", i, j, repr(float(op.d[i, j]))])
