import numpy as np
import pytest
import scipy.integrate

from dgtime.dg_core import (
    DuhamelReference,
    Mollifier,
    PiecewisePoly,
    dg_step,
    dual_form,
    greens_pair,
    interpolate,
    make_mollifier,
    primal_form,
    quad_grid,
    random_piecewise_poly,
    solve_dual,
    solve_primal,
)
from dgtime.operators import make_dense, make_diagonal, make_fem1d
from dgtime.polybasis import build_reference
from dgtime.rational import RationalTable, eval_propagator
from dgtime.temporal_mesh import make_quasi_uniform, make_uniform


# -- local step ---------------------------------------------------------------


def test_dg_step_r0_is_backward_euler_like():
    # (1 + tau a) U = tau fbar + u_prev
    a, tau, fbar, u_prev = 2.0, 0.25, 3.0, 1.0
    op = make_diagonal([a])
    elem = build_reference(0)
    moments = np.array([[tau * fbar]])
    U = dg_step(op, elem, tau, np.array([u_prev]), moments)
    expected = (tau * fbar + u_prev) / (1.0 + tau * a)
    assert U[0, 0] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("r", range(4))
def test_dg_step_constant_continuation(r):
    # f = 0 and vanishing A keep the previous value on all nodes
    op = make_diagonal([1e-14, 1e-14])
    elem = build_reference(r)
    u_prev = np.array([2.0, -1.0])
    U = dg_step(op, elem, 0.5, u_prev, np.zeros((r + 1, 2)))
    np.testing.assert_allclose(U, np.tile(u_prev, (r + 1, 1)), atol=1e-12)


def test_dg_step_r1_matches_rational_table():
    op = make_diagonal([1.0])
    elem = build_reference(1)
    U = dg_step(op, elem, 1.0, np.array([1.0]), np.zeros((2, 1)))
    expected = eval_propagator(RationalTable.build(1), 1.0).real
    np.testing.assert_allclose(U[:, 0], expected, rtol=1e-12)


# -- primal solver ------------------------------------------------------------


def test_solve_primal_zero_data_zero_solution():
    op = make_diagonal([1.0, 2.0])
    mesh = make_uniform(1.0, 4)
    sol = solve_primal(op, mesh, 1, None, np.zeros(2))
    assert np.all(sol.coeffs == 0.0)


def test_solve_primal_scalar_trace_power():
    op = make_diagonal([1.0])
    mesh = make_uniform(1.0, 8)
    sol = solve_primal(op, mesh, 1, None, np.array([1.0]))
    rho = eval_propagator(RationalTable.build(1), 0.125).real[1]
    traces = sol.right_traces()[:, 0]
    np.testing.assert_allclose(traces, rho ** np.arange(1, 9), rtol=1e-11)


@pytest.mark.parametrize("r", [1, 2])
def test_solve_primal_polynomial_exactness(r):
    rng = np.random.default_rng(5)
    lam = np.array([1.0, 2.0, 3.0])
    op = make_diagonal(lam)
    mesh = make_quasi_uniform(1.0, 8, 0.5, seed=9)
    a = rng.standard_normal((r + 1, 3))

    def u(t):
        t = np.asarray(t, dtype=float)
        return sum(a[k][None, :] * t[:, None] ** k for k in range(r + 1))

    def f(t):
        t = np.asarray(t, dtype=float)
        du = sum(k * a[k][None, :] * t[:, None] ** (k - 1) for k in range(1, r + 1))
        return du + u(t) * lam[None, :]

    sol = solve_primal(op, mesh, r, f, u(np.array([0.0]))[0])
    tq, _, vals = sol.quad_values()
    exact = u(tq.ravel()).reshape(vals.shape)
    assert np.max(np.abs(vals - exact)) < 1e-10
    np.testing.assert_allclose(
        sol.right_traces(), u(mesh.breakpoints[1:]), atol=1e-10
    )


def test_solve_primal_fem1d_and_diagonal_agree_on_spectrum():
    fem = make_fem1d(12)
    w, V, Vinv = fem.spectral()
    diag = make_diagonal(w)
    u0 = np.sin(np.pi * np.linspace(0, 1, 13)[1:-1])
    mesh = make_uniform(0.5, 6)
    sol_fem = solve_primal(fem, mesh, 1, None, u0)
    sol_diag = solve_primal(diag, mesh, 1, None, Vinv @ u0)
    # map the modal solution back to nodal values
    back = np.einsum("km,njm->njk", V, sol_diag.coeffs)
    np.testing.assert_allclose(sol_fem.coeffs, back, atol=1e-9)


def test_solve_primal_dense_nonsymmetric_runs_and_is_consistent():
    A = np.array([[2.0, 1.0], [0.0, 3.0]])
    op = make_dense(A)
    mesh = make_uniform(1.0, 64)
    u0 = np.array([1.0, 1.0])
    sol = solve_primal(op, mesh, 2, None, u0)
    expected = scipy.integrate.solve_ivp(
        lambda t, y: -A @ y, (0.0, 1.0), u0, rtol=1e-11, atol=1e-12
    ).y[:, -1]
    np.testing.assert_allclose(sol.right_traces()[-1], expected, rtol=1e-6)


# -- traces, jumps, serialization ----------------------------------------------


def test_piecewise_poly_traces_and_jumps():
    mesh = make_uniform(1.0, 2)
    coeffs = np.array([[[1.0], [2.0]], [[5.0], [7.0]]])
    poly = PiecewisePoly(mesh, 1, coeffs, initial_trace=np.array([0.0]))
    np.testing.assert_allclose(poly.left_traces(), [[1.0], [5.0]])
    np.testing.assert_allclose(poly.right_traces(), [[2.0], [7.0]])
    np.testing.assert_allclose(poly.jumps(), [[1.0], [3.0]])


def test_piecewise_poly_eval_breakpoint_takes_right_limit():
    mesh = make_uniform(1.0, 2)
    coeffs = np.array([[[1.0], [2.0]], [[5.0], [7.0]]])
    poly = PiecewisePoly(mesh, 1, coeffs)
    assert poly.eval(0.5)[0] == pytest.approx(5.0)
    assert poly.eval(1.0)[0] == pytest.approx(7.0)


def test_dump_load_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    mesh = make_quasi_uniform(1.0, 5, 0.4, seed=2)
    poly = random_piecewise_poly(mesh, 2, 3, rng, initial_trace=True)
    path = tmp_path / "sol.txt"
    poly.dump(path)
    back = PiecewisePoly.load(path)
    np.testing.assert_array_equal(poly.coeffs, back.coeffs)
    np.testing.assert_array_equal(poly.initial_trace, back.initial_trace)
    np.testing.assert_array_equal(poly.mesh.breakpoints, back.mesh.breakpoints)


# -- interpolation --------------------------------------------------------------


def test_interpolate_constant():
    mesh = make_uniform(1.0, 4)
    out = interpolate(mesh, 1, lambda t: np.full(np.shape(t), 3.5))
    np.testing.assert_allclose(out.coeffs, 3.5, atol=1e-13)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_interpolate_reproduces_t_power_r(r):
    mesh = make_quasi_uniform(1.0, 6, 0.5, seed=1)
    out = interpolate(mesh, r, lambda t: np.asarray(t) ** r)
    tq, _, vals = out.quad_values()
    np.testing.assert_allclose(vals[..., 0], tq**r, atol=1e-10)


def test_interpolate_right_endpoint_and_moments():
    mesh = make_uniform(1.0, 5)
    r = 2
    out = interpolate(mesh, r, lambda t: np.sin(3.0 * np.asarray(t)))
    np.testing.assert_allclose(
        out.right_traces()[:, 0], np.sin(3.0 * mesh.breakpoints[1:]), atol=1e-12
    )
    # vanishing moments against degree r-1 polynomials
    tq, wq, vals = out.quad_values(n_quad=12)
    err = vals[..., 0] - np.sin(3.0 * tq)
    for power in range(r):
        s = (tq - mesh.breakpoints[:-1, None]) / mesh.tau_n[:, None]
        moments = (err * s**power * wq).sum(axis=1)
        assert np.max(np.abs(moments)) < 1e-10


def test_interpolate_second_order_for_smooth_function():
    errors = []
    taus = []
    for N in (8, 16, 32, 64):
        mesh = make_uniform(1.0, N)
        out = interpolate(mesh, 1, lambda t: np.sin(np.asarray(t)))
        tq, wq, vals = out.quad_values(n_quad=8)
        err = np.abs(vals[..., 0] - np.sin(tq))
        errors.append(err.max())
        taus.append(mesh.tau)
    slope = np.polyfit(np.log(taus), np.log(errors), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


# -- mollifier -------------------------------------------------------------------


def test_mollifier_unit_mass_and_moments():
    mesh = make_uniform(1.0, 8)
    for r in (1, 2):
        moll = make_mollifier(mesh, r, 3, 0.45)
        assert np.max(moll.moment_errors()) < 1e-10


def test_mollifier_midpoint_symmetry():
    mesh = make_uniform(1.0, 4)
    moll = make_mollifier(mesh, 1, 1, 0.375)  # midpoint of (0.25, 0.5)
    xs = np.linspace(0.25, 0.5, 2001)[1:-1]
    vals = moll(xs)
    np.testing.assert_allclose(vals, vals[::-1], atol=1e-12)
    # first moment about the midpoint vanishes
    first = scipy.integrate.trapezoid(vals * (xs - 0.375), xs)
    assert abs(first) < 1e-10


def test_mollifier_linf_halves_when_interval_doubles():
    a = make_mollifier(make_uniform(1.0, 8), 1, 4, 0.5625)
    b = make_mollifier(make_uniform(2.0, 8), 1, 4, 1.125)
    ratio = b.lp_norm(np.inf) / a.lp_norm(np.inf)
    assert ratio == pytest.approx(0.5, rel=1e-8)


def test_mollifier_rejects_center_at_breakpoint():
    mesh = make_uniform(1.0, 4)
    with pytest.raises(ValueError):
        make_mollifier(mesh, 1, 1, 0.25)
    with pytest.raises(ValueError):
        make_mollifier(mesh, 1, 1, 0.5)


def test_mollifier_support_inside_interval():
    mesh = make_uniform(1.0, 4)
    moll = make_mollifier(mesh, 2, 1, 0.3)
    ts = np.array([0.0, 0.24999, 0.25, 0.5, 0.50001, 1.0])
    np.testing.assert_array_equal(moll(ts), np.zeros(6))


# -- dual solver and bilinear forms ----------------------------------------------


def test_solve_dual_zero_data():
    op = make_diagonal([1.0, 2.0])
    mesh = make_uniform(1.0, 3)
    sol = solve_dual(op, mesh, 1, None, np.zeros(2))
    assert np.all(sol.coeffs == 0.0)


def test_duality_identity_random_polys():
    rng = np.random.default_rng(11)
    for op in (make_diagonal([1.0, 3.0, 7.0]), make_fem1d(9),
               make_dense(np.array([[2.0, 1.0], [0.0, 3.0]]))):
        mesh = make_quasi_uniform(1.0, 6, 0.5, seed=4)
        v = random_piecewise_poly(mesh, 1, op.dim, rng)
        phi = random_piecewise_poly(mesh, 1, op.dim, rng)
        a = primal_form(op, v, phi)
        b = dual_form(op, v, phi)
        scale = abs(a) + abs(b) + 1.0
        assert abs(a - b) <= 1e-9 * scale


def test_primal_scheme_satisfies_variational_identity():
    # B(u, phi) = int <f, phi> + <u0, phi(0+)> for all discrete phi
    rng = np.random.default_rng(13)
    op = make_diagonal([1.0, 4.0])
    mesh = make_quasi_uniform(1.0, 5, 0.5, seed=8)
    fpoly = random_piecewise_poly(mesh, 1, 2, rng)
    u0 = rng.standard_normal(2)
    sol = solve_primal(op, mesh, 1, fpoly, u0)
    for _ in range(4):
        phi = random_piecewise_poly(mesh, 1, 2, rng)
        lhs = primal_form(op, sol, phi)
        _, wq, fv = fpoly.quad_values()
        _, _, pv = phi.quad_values()
        rhs = float(np.einsum("nqm,nqm,nq->", fv, pv, wq))
        rhs += float(u0 @ phi.left_traces()[0])
        scale = abs(lhs) + abs(rhs) + 1.0
        assert abs(lhs - rhs) <= 1e-9 * scale


def test_dual_scheme_satisfies_variational_identity():
    # B'(v, gamma) = int <v, g> for all discrete v when the terminal value is 0
    rng = np.random.default_rng(17)
    op = make_diagonal([1.0, 2.5])
    mesh = make_uniform(1.0, 6)

    def g(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.sin(2.0 * t), np.cos(t)], axis=-1)

    gamma = solve_dual(op, mesh, 2, g, np.zeros(2), oversample=4)
    for _ in range(4):
        v = random_piecewise_poly(mesh, 2, 2, rng)
        lhs = dual_form(op, v, gamma)
        tq, wq, vv = v.quad_values(n_quad=10)
        gv = g(tq.ravel()).reshape(vv.shape)
        rhs = float(np.einsum("nqm,nqm,nq->", vv, gv, wq))
        scale = abs(lhs) + abs(rhs) + 1.0
        assert abs(lhs - rhs) <= 1e-8 * scale


def test_dual_solution_is_time_reflected_primal_for_self_adjoint():
    op = make_diagonal([2.0])
    mesh = make_uniform(1.0, 4)

    def g(t):
        return np.exp(-np.asarray(t, dtype=float))[..., None]

    gamma = solve_dual(op, mesh, 1, g, np.zeros(1), oversample=8)

    def g_ref(t):
        return np.exp(-(1.0 - np.asarray(t, dtype=float)))[..., None]

    forward = solve_primal(op, mesh, 1, g_ref, np.zeros(1), oversample=8)
    rng = np.random.default_rng(29)
    ts = rng.uniform(0.001, 0.999, size=40)  # avoid breakpoints: one-sided limits differ
    np.testing.assert_allclose(gamma.eval(ts), forward.eval(1.0 - ts), atol=1e-12)


# -- green pair -------------------------------------------------------------------


def test_greens_pair_zero_vector():
    op = make_diagonal([1.0, 2.0])
    mesh = make_uniform(1.0, 8)
    ref, gtau = greens_pair(op, mesh, 1, 4, 0.55, np.zeros(2))
    assert np.all(gtau.coeffs == 0.0)
    assert np.all(ref.eval(np.linspace(0, 1, 7)) == 0.0)


def test_greens_pair_causality():
    op = make_diagonal([1.0, 10.0])
    mesh = make_uniform(1.0, 8)
    ref, gtau = greens_pair(op, mesh, 1, 4, 0.55, np.array([1.0, -1.0]))
    # zero beyond the source interval in forward time
    ts = np.linspace(0.63, 1.0, 9)
    assert np.max(np.abs(ref.eval(ts))) < 1e-14
    assert np.max(np.abs(gtau.coeffs[5:])) < 1e-12


def test_greens_pair_scalar_duhamel_oracle():
    op = make_diagonal([1.0])
    mesh = make_uniform(1.0, 4)
    ref, _ = greens_pair(op, mesh, 1, 2, 0.6, np.array([1.0]))
    delta = ref.delta
    for t in (0.1, 0.45, 0.52, 0.58):
        oracle, _ = scipy.integrate.quad(
            lambda s: np.exp(-(s - t)) * delta(s), max(t, delta.t_lo), delta.t_hi,
            epsabs=1e-13, epsrel=1e-12,
        )
        assert ref.eval(t)[0] == pytest.approx(oracle, rel=1e-9, abs=1e-13)


def test_greens_pair_reference_stable_under_refinement():
    op = make_diagonal([1.0, 5.0, 25.0])
    mesh = make_uniform(1.0, 8)
    ref, _ = greens_pair(op, mesh, 1, 4, 0.55, np.array([1.0, 1.0, 1.0]))
    ts = np.linspace(0.0, 0.6, 13)
    a = ref.eval(ts)
    b = ref.refined().eval(ts)
    assert np.max(np.abs(a - b)) < 1e-11 * max(np.max(np.abs(a)), 1.0)


def test_greens_pair_matches_generic_dual_solve():
    op = make_diagonal([1.0, 4.0])
    mesh = make_uniform(1.0, 8)
    phi = np.array([1.0, 0.5])
    ref, gtau = greens_pair(op, mesh, 1, 4, 0.5703125, phi)
    delta = ref.delta

    def rhs(t):
        return np.asarray(delta(t))[..., None] * phi[None, :]

    generic = solve_dual(op, mesh, 1, rhs, np.zeros(2), n_quad=4, oversample=24)
    assert np.max(np.abs(generic.coeffs - gtau.coeffs)) < 1e-8


# -- galerkin orthogonality -------------------------------------------------------


def test_galerkin_orthogonality_against_smooth_reference():
    rng = np.random.default_rng(23)
    lam = np.array([1.0, 4.0, 9.0])
    op = make_diagonal(lam)
    w1, w2 = rng.standard_normal(3), rng.standard_normal(3)

    def u(t):
        t = np.asarray(t, dtype=float)[..., None]
        return np.exp(-t) * w1[None, :] + np.sin(t) * w2[None, :]

    def f(t):
        t = np.asarray(t, dtype=float)[..., None]
        du = -np.exp(-t) * w1[None, :] + np.cos(t) * w2[None, :]
        return du + u(t.ravel()) * lam[None, :]

    mesh = make_quasi_uniform(1.0, 8, 0.5, seed=21)
    u0 = u(np.array([0.0]))[0]
    sol = solve_primal(op, mesh, 2, f, u0, oversample=4)
    uI = interpolate(mesh, 2, u, oversample=4)
    # represent the reference error via interpolation + the smooth remainder:
    # B(u - u_tau, phi) = 0; assemble with the interpolant plus a correction
    for _ in range(3):
        phi = random_piecewise_poly(mesh, 2, 3, rng)
        b_sol = primal_form(op, sol, phi)
        # B(u, phi) assembled from the strong residual of the exact solution
        tq, wq, pv = phi.quad_values(n_quad=12)
        fv = f(tq.ravel()).reshape(pv.shape)
        b_exact = float(np.einsum("nqm,nqm,nq->", fv, pv, wq))
        b_exact += float(u0 @ phi.left_traces()[0])
        scale = abs(b_sol) + abs(b_exact) + 1.0
        assert abs(b_sol - b_exact) <= 1e-7 * scale
