import csv

import numpy as np
import pytest

from dgtime.operators import make_diagonal
from dgtime.rational import (
    AStabilityReport,
    RationalError,
    RationalTable,
    SectorContour,
    check_a_stability,
    check_sector_bounds,
    duhamel_product,
    eval_R,
    eval_propagator,
    extract_polynomials,
    poles,
    right_half_plane_grid,
    write_csv_report,
)
from dgtime.temporal_mesh import make_quasi_uniform, make_uniform


def r1_closed_forms(z):
    den = 1.0 + 2.0 * z / 3.0 + z**2 / 6.0
    r00 = (1.0 + 2.0 * z / 3.0) / den
    r10 = (1.0 - z / 3.0) / den
    return r00, r10


def test_r0_is_scalar_resolvent():
    table = RationalTable.build(0)
    rng = np.random.default_rng(0)
    for _ in range(100):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        if abs(1.0 + z) < 0.1:
            continue
        assert eval_R(table, z)[0, 0] == pytest.approx(1.0 / (1.0 + z), rel=1e-12)


def test_r1_propagator_matches_pade_form():
    table = RationalTable.build(1)
    rng = np.random.default_rng(1)
    for _ in range(100):
        z = 3.0 * (rng.standard_normal() + 1j * rng.standard_normal())
        r00, r10 = r1_closed_forms(z)
        col = eval_propagator(table, z)
        assert col[0] == pytest.approx(r00, rel=1e-9)
        assert col[1] == pytest.approx(r10, rel=1e-9)


@pytest.mark.parametrize("r", range(5))
def test_consistency_at_zero(r):
    table = RationalTable.build(r)
    np.testing.assert_allclose(eval_propagator(table, 0.0), np.ones(r + 1), atol=1e-12)


@pytest.mark.parametrize("r", range(5))
def test_denominator_degree_and_lead(r):
    table = RationalTable.build(r)
    qhat, q = extract_polynomials(table)
    assert qhat.size == r + 2
    assert abs(qhat[-1]) > 1e-12
    # leading coefficient of det(K + z Mt) is det(Mt)
    assert qhat[-1] == pytest.approx(np.linalg.det(table.elem.Mt), rel=1e-8)
    assert q.shape == (r + 1, r + 1, r + 1)


def test_r0_r1_denominators():
    qhat0, _ = extract_polynomials(RationalTable.build(0))
    np.testing.assert_allclose(qhat0, [1.0, 1.0], atol=1e-12)
    qhat1, _ = extract_polynomials(RationalTable.build(1))
    scaled = qhat1 / qhat1[0]
    np.testing.assert_allclose(scaled, [1.0, 2.0 / 3.0, 1.0 / 6.0], atol=1e-10)


@pytest.mark.parametrize("r", range(5))
def test_polynomial_ratio_matches_solver(r):
    table = RationalTable.build(r)
    qhat, q = extract_polynomials(table)
    rng = np.random.default_rng(2)
    pts = 2.0 * (rng.standard_normal(100) + 1j * rng.standard_normal(100))
    for z in pts:
        denom = np.polynomial.polynomial.polyval(z, qhat)
        if abs(denom) < 1e-3:
            continue
        expected = np.array(
            [
                [np.polynomial.polynomial.polyval(z, q[i, j]) / denom for j in range(r + 1)]
                for i in range(r + 1)
            ]
        )
        np.testing.assert_allclose(eval_R(table, z), expected, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("r", range(5))
def test_poles_leave_decay_region_and_contour_free(r):
    # In the e^{-z} sign convention the poles sit strictly in the open left
    # half-plane, so the closed right half-plane and the sector boundary rays
    # (|arg z| = delta < pi/2) are pole-free.
    roots = poles(RationalTable.build(r))
    assert np.all(roots.real < 0.0)
    for delta in (np.pi / 6, np.pi / 3, 0.49 * np.pi):
        for root in roots:
            assert abs(abs(np.angle(root)) - delta) > 1e-3


@pytest.mark.parametrize("r", range(5))
def test_a_stability_on_right_half_plane(r):
    rep = check_a_stability(RationalTable.build(r))
    assert rep.max_modulus <= 1.0 + 1e-12
    assert rep.modulus_at_infinity < 1e-6
    assert rep.a_stable and rep.strongly_a_stable


def test_r1_imaginary_axis_modulus():
    table = RationalTable.build(1)
    for y in np.logspace(-2, 4, 50):
        assert abs(eval_propagator(table, 1j * y)[1]) <= 1.0 + 1e-12


def test_r1_large_real_argument_decay():
    # R_10(z) ~ -2/z for large real z
    table = RationalTable.build(1)
    z = 1e6
    assert eval_propagator(table, z)[1] * z == pytest.approx(-2.0, rel=1e-4)


def test_propagator_first_order_consistency():
    # value 1 and derivative -1 at the origin, like the exponential decay map
    for r in range(5):
        table = RationalTable.build(r)
        h = 1e-6
        val0 = eval_propagator(table, 0.0)[r]
        val1 = eval_propagator(table, h)[r]
        assert val0 == pytest.approx(1.0, abs=1e-12)
        assert (val1 - val0) / h == pytest.approx(-1.0, abs=1e-5)


def test_near_pole_evaluation_reported():
    table = RationalTable.build(0)
    with pytest.raises(RationalError):
        eval_R(table, -1.0 + 1e-14j)


def test_sector_bounds_r1_terminal_entry():
    table = RationalTable.build(1)
    rep = check_sector_bounds(table, SectorContour(np.pi / 3))
    assert rep.propagator_feasible[1]
    assert np.isfinite(rep.decay_constant[1])
    assert rep.decay_constant[1] > 0.0
    # doubling the sample count moves the fit by < 5%
    dense = SectorContour(np.pi / 3, radii=np.logspace(-3.0, 6.0, 482))
    rep2 = check_sector_bounds(table, dense)
    assert rep2.decay_constant[1] == pytest.approx(rep.decay_constant[1], rel=0.05)


def test_sector_bounds_flags_match_measured_moduli():
    table = RationalTable.build(1)
    contour = SectorContour(np.pi / 3)
    rep = check_sector_bounds(table, contour)
    mods = np.array([np.abs(eval_R(table, z)[:, 0]) for z in contour.points()])
    for i in range(2):
        assert rep.propagator_feasible[i] == bool(np.all(mods[:, i] < 1.0))
    assert np.all(np.isfinite(rep.amplitude_constant))


def test_sector_decay_slope_minus_one():
    # |R_10| on the ray decays with log-log slope -1 (degree gap of one)
    table = RationalTable.build(1)
    radii = np.logspace(3.0, 6.0, 10)
    mods = [abs(eval_propagator(table, rr * np.exp(1j * np.pi / 3))[1]) for rr in radii]
    slope = np.polyfit(np.log(radii), np.log(mods), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)


def test_duhamel_product_empty_sums_single_interval():
    # N = 1 reduces to the single-step expression
    table = RationalTable.build(1)
    op = make_diagonal([2.0])
    mesh = make_uniform(1.0, 1)
    u0 = np.array([1.0])
    out = duhamel_product(table, op, mesh, None, u0)
    expected = eval_propagator(table, 2.0).real
    np.testing.assert_allclose(out[0, :, 0], expected, rtol=1e-12)


def test_duhamel_product_homogeneous_power():
    table = RationalTable.build(1)
    op = make_diagonal([1.0])
    mesh = make_uniform(1.0, 4)
    out = duhamel_product(table, op, mesh, None, np.array([1.0]))
    rho = eval_propagator(table, 0.25).real[1]
    for n in range(4):
        assert out[n, 1, 0] == pytest.approx(rho ** (n + 1), rel=1e-12)


def test_right_half_plane_grid_stays_in_closed_half_plane():
    assert np.all(right_half_plane_grid().real >= -1e-12)


def test_csv_report_columns(tmp_path):
    table = RationalTable.build(1)
    rep = check_sector_bounds(table, SectorContour(np.pi / 3))
    out = tmp_path / "rational.csv"
    write_csv_report(table, rep, out)
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["i", "j", "delta", "fitted_C", "max_modulus_right_half_plane"]
    assert len(rows) == 1 + 4
