"""Bundled discretization context passed through the solver layers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .boundary import EDGES, EdgeCondition, edge_geometries
from .fields import FluidPair
from .sbp import TensorOps2D


@dataclass
class Problem:
    """Operators, materials, boundary setup, and penalty scalings of one run."""

    ops: TensorOps2D
    fluids: FluidPair
    bcs: dict = field(default_factory=dict)
    sigma0: float = 1.0
    sigma1: float = -0.5
    sigma2: float = -1.0
    kappa: float = 0.0
    forcing: object = None  # callable t -> (f1, f2) arrays, or None

    def __post_init__(self):
        if self.sigma0 < 0.5:
            # the data bound needs 1 - 2 sigma0 <= 0
            raise ValueError(f"sigma0 must be >= 1/2, got {self.sigma0}")
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        full = {}
        for name in EDGES:
            cond = self.bcs.get(name, EdgeCondition("wall"))
            if not isinstance(cond, EdgeCondition):
                raise TypeError(f"bcs[{name!r}] must be an EdgeCondition")
            full[name] = cond
        unknown = set(self.bcs) - set(EDGES)
        if unknown:
            raise ValueError(f"unknown edge names {sorted(unknown)}")
        self.bcs = full
        self.geos = edge_geometries(self.ops)

    @property
    def all_walls(self) -> bool:
        return all(cond.kind == "wall" for cond in self.bcs.values())
