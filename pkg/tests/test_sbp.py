"""Operator-level properties: norms, almost-skewness, accuracy, 2D assembly."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sbpflow.sbp import (MIN_NODES_1D, MIN_NODES_2D, Grid2D, TensorOps2D,
                         export_operator_csv, sbp_operator)


def boundary_matrix(n):
    b = np.zeros((n, n))
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    return b


@given(order=st.sampled_from([2, 4]), n=st.integers(8, 64))
@settings(max_examples=40, deadline=None)
def test_q_plus_qt_is_b(order, n):
    op = sbp_operator(order, n, 0.7 / (n - 1))
    q = op.q
    assert np.abs(q + q.T - boundary_matrix(n)).max() <= 1e-14


@given(order=st.sampled_from([2, 4]), n=st.integers(8, 64))
@settings(max_examples=40, deadline=None)
def test_quadrature_positive(order, n):
    op = sbp_operator(order, n, 1.0 / (n - 1))
    assert np.all(op.p > 0.0)


@pytest.mark.parametrize("order", [2, 4])
def test_quadrature_integrates_low_monomials(order):
    # the diagonal norm integrates x^k exactly up to the closure degree
    n = 41
    op = sbp_operator(order, n, 1.0 / (n - 1))
    x = np.linspace(0.0, 1.0, n)
    for k in range(order // 2 + 1):
        assert abs(op.p @ x ** k - 1.0 / (k + 1)) <= 1e-13


@pytest.mark.parametrize("order", [2, 4])
def test_derivative_exact_on_monomials(order):
    n = 33
    op = sbp_operator(order, n, 1.0 / (n - 1))
    x = np.linspace(0.0, 1.0, n)
    for k in range(order // 2 + 1):
        expect = k * x ** (k - 1) if k else np.zeros(n)
        assert np.abs(op.d @ x ** k - expect).max() <= 1e-12
    # interior rows are exact one order higher
    k = order
    interior = slice(8, n - 8)
    err = (op.d @ x ** k - k * x ** (k - 1))[interior]
    assert np.abs(err).max() <= 1e-11


@pytest.mark.parametrize("order,rate", [(2, 1.4), (4, 2.4)])
def test_derivative_convergence_rate(order, rate):
    # closure rows of order p limit the global L2 truncation rate to p + 1/2
    errs = []
    for n in (33, 65):
        h = 1.0 / (n - 1)
        op = sbp_operator(order, n, h)
        x = np.linspace(0.0, 1.0, n)
        f = np.sin(2.0 * np.pi * x + 0.7)
        df = 2.0 * np.pi * np.cos(2.0 * np.pi * x + 0.7)
        errs.append(np.sqrt(op.p @ (op.d @ f - df) ** 2))
    observed = np.log2(errs[0] / errs[1])
    assert observed >= rate


def test_operator_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sbp_operator(3, 20, 0.1)
    with pytest.raises(ValueError):
        sbp_operator(2, MIN_NODES_1D[2] - 1, 0.1)
    with pytest.raises(ValueError):
        sbp_operator(4, MIN_NODES_1D[4] - 1, 0.1)
    with pytest.raises(ValueError):
        sbp_operator(2, 10, 0.0)


def test_grid_properties_and_validation():
    g = Grid2D(5, 9, 1.0, 3.0, -1.0, 0.0)
    assert g.hx == pytest.approx(0.5)
    assert g.hy == pytest.approx(0.125)
    X, Y = g.mesh()
    assert X.shape == (5, 9)
    assert X[2, 0] == pytest.approx(2.0)
    assert Y[0, -1] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        Grid2D(1, 5)
    with pytest.raises(ValueError):
        Grid2D(5, 5, 0.0, 0.0)


def test_tensor_ops_match_dense_kron(rng):
    ops = TensorOps2D(Grid2D(9, 12, 0.0, 1.0, 0.0, 2.0), 2)
    f = rng.standard_normal((9, 12))
    dxf = (ops.dense_dx() @ f.reshape(-1)).reshape(9, 12)
    dyf = (ops.dense_dy() @ f.reshape(-1)).reshape(9, 12)
    assert np.abs(ops.dx(f) - dxf).max() <= 1e-13
    assert np.abs(ops.dy(f) - dyf).max() <= 1e-13
    # transposes against the dense transposes
    dxtf = (ops.dense_dx().T @ f.reshape(-1)).reshape(9, 12)
    dytf = (ops.dense_dy().T @ f.reshape(-1)).reshape(9, 12)
    assert np.abs(ops.dx_t(f) - dxtf).max() <= 1e-13
    assert np.abs(ops.dy_t(f) - dytf).max() <= 1e-13


def test_quadrature_is_tensor_product(rng):
    ops = TensorOps2D(Grid2D(8, 10), 4)
    u = rng.standard_normal((8, 10))
    v = rng.standard_normal((8, 10))
    # explicit double sum oracle
    expect = 0.0
    for i in range(8):
        for j in range(10):
            expect += ops.px[i] * ops.py[j] * u[i, j] * v[i, j]
    assert ops.quad_inner(u, v) == pytest.approx(expect, rel=1e-13)
    assert ops.quad_norm(u) == pytest.approx(np.sqrt(ops.quad_inner(u, u)), rel=1e-13)


@pytest.mark.parametrize("order", [2, 4])
def test_2d_integration_by_parts(order, rng):
    ops = TensorOps2D(Grid2D(12, 9, 0.0, 2.0, 0.0, 1.0), order)
    for _ in range(5):
        u = rng.standard_normal((12, 9))
        v = rng.standard_normal((12, 9))
        lhs_x = ops.quad_inner(ops.dx(u), v) + ops.quad_inner(u, ops.dx(v))
        bx = np.sum(ops.py * (u[-1] * v[-1] - u[0] * v[0]))
        lhs_y = ops.quad_inner(ops.dy(u), v) + ops.quad_inner(u, ops.dy(v))
        by = np.sum(ops.px * (u[:, -1] * v[:, -1] - u[:, 0] * v[:, 0]))
        scale = max(1.0, ops.quad_norm(u) * ops.quad_norm(v))
        assert abs(lhs_x - bx) <= 1e-13 * scale
        assert abs(lhs_y - by) <= 1e-13 * scale


def test_tensor_ops_node_minimums():
    with pytest.raises(ValueError):
        TensorOps2D(Grid2D(MIN_NODES_2D[2] - 1, 17), 2)
    with pytest.raises(ValueError):
        TensorOps2D(Grid2D(17, MIN_NODES_2D[4] - 1), 4)
    with pytest.raises(ValueError):
        TensorOps2D(Grid2D(17, 17), 6)


def test_export_operator_csv(tmp_path):
    op = sbp_operator(2, 6, 0.2)
    path = tmp_path / "op.csv"
    export_operator_csv(op, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# sbp operator")
    assert lines[1] == "matrix,row,col,value"
    # P entries reconstruct the quadrature exactly through repr
    pvals = [float(l.split(",")[3]) for l in lines[2:] if l.startswith("P,")]
    assert pvals == list(op.p)
