"""Command line entry point.

Exit codes: 0 success, 2 energy-identity violation, 3 solver or state
failure, 4 configuration error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, load_config
from .diagnostics import IdentityError, energy_budget
from .fields import PositivityError
from .pressure import PressureWorkspace, SolverError, project_state
from .scenarios import ScenarioError

EXIT_OK = 0
EXIT_IDENTITY = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4


def _cmd_run(args) -> int:
    from .runner import run

    cfg = load_config(args.config)
    result = run(cfg, out_dir=args.out, assert_mode=True if args.assert_mode else None,
                 order=args.order)
    last = result.rows[-1]
    print(f"steps={result.steps} t={last['t']:.6g} energy={last['energy']:.12g} "
          f"residual={last['residual']:.3e}")
    print(f"outputs written to {result.out_dir}")
    return EXIT_OK


def _cmd_verify_ops(args) -> int:
    from .sbp import Grid2D, TensorOps2D, sbp_operator

    order = args.order
    n = args.n
    rng = np.random.default_rng(7)
    ok = True

    op = sbp_operator(order, n, 1.0 / (n - 1))
    q = op.q
    b = np.zeros((n, n))
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    err_q = np.abs(q + q.T - b).max()
    ok &= _check("Q + Q^T = B", err_q, 1e-14)

    x = np.linspace(0.0, 1.0, n)
    deg = order // 2 + 1  # boundary closures are exact one degree lower
    for k in range(deg):
        err = np.abs(op.d @ x ** k - (k * x ** (k - 1) if k else 0.0)).max()
        ok &= _check(f"derivative exact on x^{k}", err, 1e-12)

    grid = Grid2D(n, n + 3, 0.0, 1.0, 0.0, 2.0)
    ops = TensorOps2D(grid, order)
    for trial in range(5):
        u = rng.standard_normal((grid.nx, grid.ny))
        v = rng.standard_normal((grid.nx, grid.ny))
        ibp_x = ops.quad_inner(ops.dx(u), v) + ops.quad_inner(u, ops.dx(v))
        bx = np.sum(ops.py * (u[-1] * v[-1] - u[0] * v[0]))
        ibp_y = ops.quad_inner(ops.dy(u), v) + ops.quad_inner(u, ops.dy(v))
        by = np.sum(ops.px * (u[:, -1] * v[:, -1] - u[:, 0] * v[:, 0]))
        scale = max(1.0, ops.quad_norm(u) * ops.quad_norm(v))
        ok &= _check(f"2D integration by parts, trial {trial}",
                     max(abs(ibp_x - bx), abs(ibp_y - by)) / scale, 1e-13)

    print("verify-ops:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_SOLVER


def _check(label: str, err: float, tol: float) -> bool:
    status = "PASS" if err <= tol else "FAIL"
    print(f"  [{status}] {label}: max error {err:.3e} (tol {tol:.1e})")
    return err <= tol


def _cmd_budget(args) -> int:
    from .runner import build_problem
    from .stepping import rhs_full

    cfg = load_config(args.config)
    problem, state, _ = build_problem(cfg)
    ws = PressureWorkspace()
    if cfg.run.project:
        state = project_state(state, problem, t=0.0)
    bundle = rhs_full(state, 0.0, problem, ws)
    budget = energy_budget(bundle, problem)
    for name in ("energy", "dE_dt", "dissipation", "bt_advective", "bt_viscous",
                 "sat_energy", "constraint_work", "forcing_work", "residual"):
        print(f"{name:16s} = {getattr(budget, name): .15e}")
    rel = abs(budget.residual) / budget.scale
    status = "PASS" if rel <= cfg.run.assert_tol else "FAIL"
    print(f"[{status}] |residual| / scale = {rel:.3e} (tol {cfg.run.assert_tol:.1e})")
    return EXIT_OK if rel <= cfg.run.assert_tol else EXIT_IDENTITY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbpflow",
        description="Energy-stable two-phase flow solver with runtime "
                    "energy-budget verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured scenario")
    p_run.add_argument("config", help="path to key=value config file")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--assert", dest="assert_mode", action="store_true",
                       help="raise on any energy-identity violation")
    p_run.add_argument("--order", type=int, choices=(2, 4), default=None,
                       help="override sbp.order")

    p_ops = sub.add_parser("verify-ops", help="check operator identities")
    p_ops.add_argument("--order", type=int, choices=(2, 4), default=2)
    p_ops.add_argument("--n", type=int, default=17)

    p_bud = sub.add_parser("budget", help="print one energy budget and exit")
    p_bud.add_argument("config", help="path to key=value config file")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify-ops":
            return _cmd_verify_ops(args)
        return _cmd_budget(args)
    except (ConfigError, ScenarioError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IdentityError as exc:
        print(f"energy identity violation: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except (SolverError, PositivityError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
