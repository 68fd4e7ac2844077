"""Time integration: step bound, RK4 order, stage bundling."""

import numpy as np
import pytest

from sbpflow.fields import compute_stress, primitives_to_state
from sbpflow.pressure import PressureWorkspace
from sbpflow.stepping import (RhsBundle, TimeControls, rhs_full, rk4_step,
                              stable_dt, step)

from conftest import random_state, wall_problem


def test_time_controls_validation():
    TimeControls(dt_mode="fixed", dt=1e-3)
    with pytest.raises(ValueError, match="dt_mode"):
        TimeControls(dt_mode="adaptive")
    with pytest.raises(ValueError, match="rk_scheme"):
        TimeControls(rk_scheme="rk3")
    with pytest.raises(ValueError, match="dt"):
        TimeControls(dt_mode="fixed", dt=0.0)
    with pytest.raises(ValueError, match="cfl"):
        TimeControls(cfl=2.5)
    with pytest.raises(ValueError, match="cfl"):
        TimeControls(cfl=0.0)
    with pytest.raises(ValueError, match="dt_max"):
        TimeControls(dt_max=0.0)
    with pytest.raises(ValueError, match="t_end"):
        TimeControls(t_end=-1.0)
    with pytest.raises(ValueError, match="max_steps"):
        TimeControls(max_steps=0)


def test_stable_dt_explicit_formula():
    problem = wall_problem(nx=11, ny=21, lx=1.0, ly=2.0)
    g = problem.ops.grid
    X, _ = g.mesh()
    rho = np.full(X.shape, problem.fluids.rho_l)  # alpha = 1 -> mu = mu_l
    u1 = np.full(X.shape, 0.3)
    u2 = np.full(X.shape, -0.2)
    state = primitives_to_state(rho, u1, u2, np.zeros_like(X))
    tc = TimeControls(cfl=0.8, dt_max=10.0)
    nu = problem.fluids.mu_l / problem.fluids.rho_l
    denom = 0.3 / g.hx + 0.2 / g.hy + 2.0 * nu * (1.0 / g.hx ** 2 + 1.0 / g.hy ** 2)
    assert stable_dt(state, problem, tc) == pytest.approx(0.8 / denom, rel=1e-14)


def test_stable_dt_caps_at_dt_max():
    from sbpflow.fields import FluidPair
    problem = wall_problem(nx=9, ny=9, fluids=FluidPair(1000.0, 1.0))  # inviscid
    X, _ = problem.ops.grid.mesh()
    state = primitives_to_state(np.full(X.shape, 1000.0), np.zeros_like(X),
                                np.zeros_like(X), np.zeros_like(X))
    tc = TimeControls(cfl=0.5, dt_max=0.125)
    assert stable_dt(state, problem, tc) == 0.125
    tc2 = TimeControls(cfl=0.5, dt_max=1e-4)
    state2 = primitives_to_state(np.full(X.shape, 1000.0), np.full(X.shape, 5.0),
                                 np.zeros_like(X), np.zeros_like(X))
    assert stable_dt(state2, problem, tc2) == 1e-4


def test_rk4_local_order_on_scalar_ode():
    # y' = -2y + sin(t): local error halves by ~2^5 when dt halves
    f = lambda t, y: -2.0 * y + np.sin(t)

    def exact(t):
        # particular + homogeneous solution through y(0) = 1
        c = 1.0 + 1.0 / 5.0
        return c * np.exp(-2.0 * t) + (2.0 * np.sin(t) - np.cos(t)) / 5.0

    errs = []
    for dt in (0.1, 0.05):
        y = rk4_step(np.array(1.0), 0.0, dt, f)
        errs.append(abs(float(y) - exact(dt)))
    ratio = errs[0] / errs[1]
    assert 24.0 < ratio < 40.0


def test_rk4_exact_on_cubic_in_time():
    # quadrature order: integrates polynomial tendencies of degree <= 3 exactly
    f = lambda t, y: 4.0 * t ** 3 - 2.0 * t
    y = rk4_step(np.array(0.5), 0.0, 0.7, f)
    assert float(y) == pytest.approx(0.5 + 0.7 ** 4 - 0.7 ** 2, rel=1e-14)


def test_step_returns_four_stage_bundles(rng):
    problem = wall_problem(nx=9, ny=9)
    state = random_state(problem.ops, problem.fluids, rng, u_amp=0.05)
    ws = PressureWorkspace()
    dt = 1e-4
    new_state, bundles = step(state, 0.0, dt, problem, ws)
    assert len(bundles) == 4
    assert all(isinstance(b, RhsBundle) for b in bundles)
    assert [b.t for b in bundles] == [0.0, dt / 2, dt / 2, dt]
    # the pressure field carried on the new state is the last stage's solve
    assert np.all(new_state.phi3 == bundles[3].p)


def test_step_freezes_phi3_within_stages(rng):
    # stage states differ in rows 0..2 but share the input pressure row
    problem = wall_problem(nx=9, ny=9)
    state = random_state(problem.ops, problem.fluids, rng, u_amp=0.05)
    ws = PressureWorkspace()
    _, bundles = step(state, 0.0, 1e-4, problem, ws)
    for b in bundles:
        assert np.all(b.state.phi3 == state.phi3)
    assert not np.all(bundles[1].state.phi1 == state.phi1)


def test_step_advances_square_root_rows_with_rk4_weights(rng):
    problem = wall_problem(nx=9, ny=9)
    state = random_state(problem.ops, problem.fluids, rng, u_amp=0.05)
    ws = PressureWorkspace()
    dt = 1e-4
    new_state, bundles = step(state, 0.0, dt, problem, ws)
    k = [b.F for b in bundles]
    expect = state.data[:3] + dt / 6.0 * (k[0] + 2 * k[1] + 2 * k[2] + k[3])
    assert np.allclose(new_state.data[:3], expect, rtol=0, atol=1e-15)


def test_rhs_full_bundle_consistency(rng):
    problem = wall_problem(nx=9, ny=9, kappa=0.5)
    state = random_state(problem.ops, problem.fluids, rng, u_amp=0.05)
    ws = PressureWorkspace()
    bundle = rhs_full(state, 0.0, problem, ws)
    stress = compute_stress(state, problem.ops, problem.fluids)
    assert np.allclose(bundle.div_u, stress.div_u, atol=1e-15)
    assert bundle.F.shape == (3, 9, 9)
    assert np.all(bundle.constraint_residual == bundle.div_u - bundle.sat3)
    assert bundle.pressure_info.pinned
