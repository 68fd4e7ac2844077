"""Energy-stable two-phase incompressible flow solver on SBP operators.

The state is carried in square-root variables (sqrt(rho), sqrt(rho) u, p)
so the semi-discrete energy budget closes term by term; diagnostics evaluate
that budget at runtime and can assert it every stage.
"""

from .boundary import (BoundaryData, EdgeCondition, TargetData, assemble_sats,
                       edge_geometries, target_edge_data)
from .config import ConfigError, RunConfig, load_config
from .diagnostics import (EnergyBudget, IdentityError, constraint_monitor,
                          energy_budget, energy_norm, total_mass)
from .fields import (FluidPair, PositivityError, StateField, alpha_of,
                     check_positivity, compute_stress, primitives_to_state,
                     state_to_primitives)
from .pressure import (PressureWorkspace, SolverError, project_state,
                       solve_pressure)
from .problem import Problem
from .runner import RunResult, build_problem, run
from .sbp import Grid2D, TensorOps2D, sbp_operator
from .scenarios import ScenarioError, init_scenario
from .stepping import TimeControls, rhs_full, stable_dt, step

__version__ = "0.1.0"

__all__ = [
    "BoundaryData", "EdgeCondition", "TargetData", "assemble_sats",
    "edge_geometries", "target_edge_data",
    "ConfigError", "RunConfig", "load_config",
    "EnergyBudget", "IdentityError", "constraint_monitor", "energy_budget",
    "energy_norm", "total_mass",
    "FluidPair", "PositivityError", "StateField", "alpha_of",
    "check_positivity", "compute_stress", "primitives_to_state",
    "state_to_primitives",
    "PressureWorkspace", "SolverError", "project_state", "solve_pressure",
    "Problem",
    "RunResult", "build_problem", "run",
    "Grid2D", "TensorOps2D", "sbp_operator",
    "ScenarioError", "init_scenario",
    "TimeControls", "rhs_full", "stable_dt", "step",
    "__version__",
]
