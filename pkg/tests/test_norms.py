import numpy as np
import pytest

from dgtime.dg_core import (
    PiecewisePoly,
    interpolate,
    random_piecewise_poly,
    solve_primal,
)
from dgtime.norms import (
    NormReport,
    WeightFn,
    broken_norm,
    dt_vs_residual_ratios,
    jump_residual_pair,
    jump_sum,
    mr_functional,
    one_step_functional,
    weighted_A_error,
)
from dgtime.operators import make_diagonal, make_fem1d
from dgtime.temporal_mesh import make_quasi_uniform, make_uniform


def constant_poly(mesh, r, values):
    values = np.asarray(values, dtype=float)
    coeffs = np.tile(values, (mesh.n_intervals, r + 1, 1))
    return PiecewisePoly(mesh, r, coeffs, initial_trace=values.copy())


def test_broken_norm_derivative_of_constant_is_zero():
    mesh = make_uniform(1.0, 4)
    u = constant_poly(mesh, 1, [3.0])
    assert broken_norm(u, 2.0, derivative_order=1) == pytest.approx(0.0, abs=1e-14)


def test_broken_norm_constant_value():
    mesh = make_uniform(2.0, 5)
    u = constant_poly(mesh, 1, [-1.5])
    assert broken_norm(u, 2.0) == pytest.approx(1.5 * np.sqrt(2.0), rel=1e-13)


def test_broken_norm_linear_function():
    # u(t) = t on a single interval: (int_0^1 t^2)^{1/2} = 1/sqrt(3)
    mesh = make_uniform(1.0, 1)
    poly = PiecewisePoly(mesh, 1, np.array([[[0.0], [1.0]]]))
    assert broken_norm(poly, 2.0) == pytest.approx(1.0 / np.sqrt(3.0), rel=1e-13)


def test_broken_norm_homogeneity_exact():
    rng = np.random.default_rng(0)
    mesh = make_quasi_uniform(1.0, 6, 0.5, seed=3)
    u = random_piecewise_poly(mesh, 2, 4, rng)
    scaled = PiecewisePoly(mesh, 2, 2.0 * u.coeffs)
    for p in (2.0, 4.0, np.inf):
        assert broken_norm(scaled, p) == pytest.approx(2.0 * broken_norm(u, p), rel=1e-14)


def test_broken_norm_holder_sanity():
    rng = np.random.default_rng(1)
    mesh = make_uniform(1.5, 8)
    u = random_piecewise_poly(mesh, 1, 2, rng)
    l2 = broken_norm(u, 2.0)
    linf = broken_norm(u, np.inf)
    assert l2 <= np.sqrt(1.5) * linf + 1e-12


def test_jump_sum_continuous_poly_is_zero():
    mesh = make_uniform(1.0, 3)
    u = constant_poly(mesh, 1, [2.0])
    assert jump_sum(u, 2.0) == pytest.approx(0.0, abs=1e-14)


def test_jump_sum_single_interval_unit_jump():
    mesh = make_uniform(1.0, 1)
    poly = PiecewisePoly(mesh, 1, np.ones((1, 2, 1)), initial_trace=np.zeros(1))
    assert jump_sum(poly, 2.0) == pytest.approx(1.0, rel=1e-14)


def test_jump_sum_requires_initial_trace():
    mesh = make_uniform(1.0, 2)
    poly = PiecewisePoly(mesh, 1, np.ones((2, 2, 1)))
    with pytest.raises(ValueError):
        jump_sum(poly, 2.0)


def test_weighted_error_zero_for_identical_data():
    op = make_diagonal([1.0, 2.0])
    mesh = make_uniform(1.0, 4)
    rng = np.random.default_rng(4)
    u = random_piecewise_poly(mesh, 1, 2, rng)
    _, _, vals = u.quad_values()
    w = WeightFn(0.5, 0.25)
    assert weighted_A_error(vals, u, w, 1.0, 2.0, op) == 0.0


def test_weighted_error_alpha_zero_equals_broken_norm():
    op = make_diagonal([1.0, 3.0])
    mesh = make_uniform(1.0, 5)
    rng = np.random.default_rng(5)
    u = random_piecewise_poly(mesh, 1, 2, rng)
    zero = PiecewisePoly(mesh, 1, np.zeros_like(u.coeffs))
    _, _, vals = u.quad_values()
    w = WeightFn(0.4, 0.2)
    a = weighted_A_error(vals, zero, w, 0.0, 2.0, op)
    b = broken_norm(u, 2.0, apply_A=op)
    assert a == pytest.approx(b, rel=1e-12)


def test_weight_fn_invariants():
    w = WeightFn(0.3, 0.1)
    t = np.linspace(0, 1, 11)
    assert np.all(w(t) >= 0.1)
    assert w(0.3) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        WeightFn(0.0, 0.0)


def test_mr_functional_zero_data():
    op = make_diagonal([1.0, 2.0])
    mesh = make_uniform(1.0, 4)
    sol = solve_primal(op, mesh, 1, None, np.zeros(2))
    rep = mr_functional(sol, None, np.zeros(2), op, 2.0)
    assert rep.dt_norm == 0.0 and rep.A_norm == 0.0 and rep.jump_norm == 0.0
    assert rep.rhs_norm == 0.0
    assert np.isnan(rep.mr_ratio)
    assert rep.flag == ""


def test_mr_functional_constant_forcing_ratio_stable():
    op = make_diagonal([1.0])
    ratios = []
    for N in (16, 32):
        mesh = make_uniform(1.0, N)
        f = lambda t: np.ones(np.shape(t) + (1,))
        sol = solve_primal(op, mesh, 1, f, np.zeros(1))
        rep = mr_functional(sol, f, np.zeros(1), op, 2.0)
        assert rep.flag == ""
        ratios.append(rep.mr_ratio)
    assert abs(ratios[1] / ratios[0] - 1.0) < 0.2


@pytest.mark.parametrize("p", [2.0, 4.0])
def test_jump_residual_inequality_constant_one(p):
    rng = np.random.default_rng(7)
    op = make_diagonal(np.logspace(0, 3, 8))
    mesh = make_quasi_uniform(1.0, 12, 0.5, seed=10)
    f = random_piecewise_poly(mesh, 1, 8, rng)
    sol = solve_primal(op, mesh, 1, f, rng.standard_normal(8))
    lhs, rhs = jump_residual_pair(sol, f, op, p)
    assert np.all(lhs <= rhs * (1.0 + 1e-9) + 1e-12 * rhs.max())


def test_dt_vs_residual_ratio_finite_and_stable():
    rng = np.random.default_rng(8)
    op = make_diagonal(np.logspace(0, 2, 5))
    maxima = []
    for N in (8, 16):
        mesh = make_uniform(1.0, N)
        f = random_piecewise_poly(mesh, 1, 5, rng)
        sol = solve_primal(op, mesh, 1, f, np.zeros(5))
        ratios = dt_vs_residual_ratios(sol, f, op, 2.0)
        finite = ratios[np.isfinite(ratios)]
        assert finite.size > 0
        maxima.append(finite.max())
    assert max(maxima) / min(maxima) < 3.0


def test_one_step_functional_continuous_constant():
    mesh = make_uniform(1.0, 4)
    op = make_diagonal([2.0])
    u = constant_poly(mesh, 1, [3.0])
    inc, aval = one_step_functional(u, op, 2.0)
    assert inc == pytest.approx(0.0, abs=1e-14)
    assert aval == pytest.approx(6.0, rel=1e-13)  # |A c| = 6 on unit total length


def test_one_step_functional_hand_traces():
    mesh = make_uniform(1.0, 1)
    op = make_diagonal([1.0])
    poly = PiecewisePoly(
        mesh, 1, np.array([[[2.0], [5.0]]]), initial_trace=np.array([1.0])
    )
    inc, aval = one_step_functional(poly, op, 2.0)
    assert inc == pytest.approx(4.0)   # |5 - 1| / 1, tau = 1
    assert aval == pytest.approx(5.0)  # |A * 5|


def test_norm_report_csv_round_trip(tmp_path):
    rep = NormReport(1.0, 2.0, 3.0, 4.0, 1.5, 3.5, 0.5)
    path = tmp_path / "report.csv"
    rep.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].split(",") == NormReport.csv_header()
    assert float(lines[1].split(",")[4]) == pytest.approx(1.5)


def test_fem1d_norms_use_grid_weights():
    op = make_fem1d(8)
    mesh = make_uniform(1.0, 2)
    u = constant_poly(mesh, 1, np.ones(op.dim))
    val = broken_norm(u, 2.0, op=op)
    expected = np.sqrt(7.0 / 8.0)  # h * (m-1) nodes, unit values, unit time span
    assert val == pytest.approx(expected, rel=1e-12)
