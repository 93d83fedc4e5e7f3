"""Rational transfer functions of one local time step.

A single step maps the incoming trace and the load moments to the nodal
values through the rational matrix functions

    R[i, j](z),  i, j = 0..r,  with  R[:, 0] also the trace propagator,

obtained by solving (K + z Mt) W = [Phi0 | I].  This module evaluates them
pointwise in the complex plane, verifies their stability and sector-decay
properties on sample grids, recovers the underlying polynomials, and provides
the step-product trace formula used as a cross-check of the sweeping solver.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from dgtime.operators import OperatorSpec
from dgtime.polybasis import ReferenceElement, build_reference
from dgtime.temporal_mesh import TemporalMesh


class RationalError(RuntimeError):
    """Raised for evaluations too close to a pole."""


@dataclass(frozen=True)
class RationalTable:
    """Evaluator for the step transfer functions of a fixed degree."""

    r: int
    elem: ReferenceElement

    @staticmethod
    def build(r: int) -> "RationalTable":
        return RationalTable(r, build_reference(r))


def eval_R(table: RationalTable, z: complex) -> np.ndarray:
    """The (r+1) x (r+1) matrix [R_ij(z)] by a linear solve.

    Column 0 equals the trace propagator (the nodal basis contains the left
    endpoint, so the incoming-trace load is the first unit vector).
    """
    r = table.r
    A = table.elem.K + z * table.elem.Mt
    rhs = np.hstack([table.elem.Phi0[:, None], np.eye(r + 1)])
    smin = np.linalg.svd(A, compute_uv=False)[-1]
    scale = max(np.linalg.norm(table.elem.K), abs(z) * np.linalg.norm(table.elem.Mt))
    if not np.isfinite(smin) or smin < 1e-12 * scale:
        raise RationalError(f"evaluation too close to a pole at z={z!r}")
    W = np.linalg.solve(A.astype(complex), rhs.astype(complex))
    residual = np.linalg.norm(A @ W - rhs) / np.linalg.norm(rhs)
    if residual > 1e-12:
        raise RationalError(f"solve residual {residual:.2e} at z={z!r}")
    return W[:, 1:]


def eval_propagator(table: RationalTable, z: complex) -> np.ndarray:
    """The vector (R_i0(z))_i multiplying the incoming trace."""
    return eval_R(table, z)[:, 0]


@dataclass(frozen=True)
class SectorContour:
    """Sample points on both rays of the sector boundary at angle delta."""

    delta: float
    radii: np.ndarray = field(
        default_factory=lambda: np.logspace(-3.0, 6.0, 241)
    )

    def points(self) -> np.ndarray:
        """Samples on arg z = +/- delta, imaginary part decreasing."""
        up = self.radii[::-1] * np.exp(1j * self.delta)
        down = self.radii * np.exp(-1j * self.delta)
        return np.concatenate([up, down])


@dataclass
class SectorBoundReport:
    """Fitted constants for the sector decay of every entry."""

    delta: float
    decay_constant: np.ndarray      # largest C with |R_i0| <= 1/(1 + C|z|); NaN if none
    amplitude_constant: np.ndarray  # per (i, j): sup |R_ij| (1 + |z|) over the contour
    propagator_feasible: np.ndarray


def check_sector_bounds(table: RationalTable, contour: SectorContour) -> SectorBoundReport:
    """Fit decay constants on the sector boundary.

    The propagator entries are fitted against the sharp form 1/(1 + C|z|),
    flagged infeasible where the modulus reaches 1 off the origin.  All
    entries also get the two-constant reading sup |R|(1 + |z|), which is the
    meaningful finite quantity for the load columns (their modulus times |z|
    tends to a fixed matrix limit, so no single-constant form can hold).
    """
    pts = contour.points()
    r = table.r
    mods = np.empty((pts.size, r + 1, r + 1))
    for k, z in enumerate(pts):
        mods[k] = np.abs(eval_R(table, z))
    absz = np.abs(pts)[:, None]
    prop = mods[:, :, 0]
    with np.errstate(divide="ignore"):
        candidates = (1.0 / prop - 1.0) / absz
    feasible = np.all(prop < 1.0, axis=0)
    decay = np.where(feasible, candidates.min(axis=0), np.nan)
    amplitude = (mods * (1.0 + absz)[:, :, None]).max(axis=0)
    return SectorBoundReport(contour.delta, decay, amplitude, feasible)


@dataclass
class AStabilityReport:
    max_modulus: float
    modulus_at_infinity: float

    @property
    def a_stable(self) -> bool:
        return self.max_modulus <= 1.0 + 1e-12

    @property
    def strongly_a_stable(self) -> bool:
        return self.a_stable and self.modulus_at_infinity < 1e-6


def right_half_plane_grid(n_radial: int = 40, n_angular: int = 21) -> np.ndarray:
    """Log-radial samples of {Re z >= 0}, including the imaginary axis."""
    radii = np.logspace(-3.0, 8.0, n_radial)
    angles = np.linspace(-np.pi / 2, np.pi / 2, n_angular)
    return (radii[:, None] * np.exp(1j * angles[None, :])).ravel()


def check_a_stability(table: RationalTable, samples: np.ndarray | None = None) -> AStabilityReport:
    """Verify |R_r0| <= 1 on the closed right half-plane samples."""
    pts = right_half_plane_grid() if samples is None else np.asarray(samples)
    top = 0.0
    for z in pts:
        top = max(top, abs(eval_propagator(table, z)[table.r]))
    at_inf = abs(eval_propagator(table, 1e8)[table.r])
    return AStabilityReport(top, at_inf)


def extract_polynomials(table: RationalTable) -> tuple[np.ndarray, np.ndarray]:
    """Recover the denominator and the numerator polynomials by interpolation.

    Returns (qhat, q) where qhat has ascending coefficients of the degree
    r + 1 determinant polynomial and q[i, j] those of the degree <= r
    numerators with R_ij = q_ij / qhat.
    """
    r = table.r
    if r > 4:
        raise ValueError("polynomial recovery supports degrees up to 4")
    K, Mt = table.elem.K, table.elem.Mt
    nodes_hat = np.arange(r + 2, dtype=float)
    dets = np.array([np.linalg.det(K + z * Mt) for z in nodes_hat])
    qhat = np.polynomial.polynomial.polyfit(nodes_hat, dets, r + 1)
    lead = np.linalg.det(Mt)
    if abs(qhat[-1]) < 1e-10 * np.abs(qhat).max() or abs(lead) < 1e-14:
        raise RationalError("denominator degenerates: leading coefficient below threshold")
    nodes_num = np.arange(r + 1, dtype=float)
    vals = np.empty((r + 1, r + 1, r + 1))
    for k, z in enumerate(nodes_num):
        A = K + z * Mt
        vals[k] = np.linalg.det(A) * np.linalg.inv(A)
    q = np.empty((r + 1, r + 1, r + 1))
    for i in range(r + 1):
        for j in range(r + 1):
            q[i, j] = np.polynomial.polynomial.polyfit(nodes_num, vals[:, i, j], r)
    return qhat, q


def poles(table: RationalTable) -> np.ndarray:
    """Roots of the denominator polynomial."""
    qhat, _ = extract_polynomials(table)
    return np.polynomial.polynomial.polyroots(qhat)


def duhamel_product(
    table: RationalTable,
    op: OperatorSpec,
    mesh: TemporalMesh,
    f_moments: np.ndarray | None,
    u0: np.ndarray,
) -> np.ndarray:
    """Nodal values by the explicit step-product trace formula.

    ``f_moments`` has shape (N, r+1, M) holding int_{J_n} f phi_i dt, or is
    None for a homogeneous problem.  Works for operators with a real spectral
    decomposition; the result has shape (N, r+1, M) and must match the
    sweeping solver.  Cost is quadratic in the number of intervals; intended
    for cross-checks at small N.
    """
    if not op.is_self_adjoint:
        raise ValueError("the product formula is implemented for self-adjoint operators")
    w, V, Vinv = op.spectral()
    N = mesh.n_intervals
    r = table.r
    u0_modal = Vinv @ np.asarray(u0, dtype=float)
    if f_moments is None:
        mom_modal = np.zeros((N, r + 1, op.dim))
    else:
        mom_modal = np.einsum("km,nim->nik", Vinv, np.asarray(f_moments, dtype=float))

    # per-mode scalar tables R(tau_n * lambda), shape (N, r+1, r+1, M)
    Rt = np.empty((N, r + 1, r + 1, op.dim))
    for n in range(N):
        for k, lam in enumerate(w):
            Rt[n, :, :, k] = np.real(eval_R(table, mesh.tau_n[n] * lam))
    rho = Rt[:, r, 0, :]                                   # trace propagators
    load = np.einsum("njk,njk->nk", Rt[:, r, :, :], mom_modal)

    out = np.empty((N, r + 1, op.dim))
    for n in range(N):
        prop_col = Rt[n, :, 0, :]                          # (r+1, M)
        chain = np.prod(rho[:n], axis=0) if n > 0 else np.ones(op.dim)
        source = chain * u0_modal
        for m in range(n):
            mid = np.prod(rho[m + 1 : n], axis=0) if n - m > 1 else np.ones(op.dim)
            source = source + mid * load[m]
        out[n] = prop_col * source[None, :] + np.einsum("ijk,jk->ik", Rt[n], mom_modal[n])
    return np.einsum("km,nim->nik", V, out)


def write_csv_report(
    table: RationalTable,
    sector: SectorBoundReport,
    path: str | Path,
) -> None:
    """Per-entry CSV: (i, j, delta, fitted_C, max_modulus_right_half_plane)."""
    grid = right_half_plane_grid()
    r = table.r
    max_mod = np.zeros((r + 1, r + 1))
    for z in grid:
        max_mod = np.maximum(max_mod, np.abs(eval_R(table, z)))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "delta", "fitted_C", "max_modulus_right_half_plane"])
        for i in range(r + 1):
            for j in range(r + 1):
                fitted = sector.decay_constant[i] if j == 0 else sector.amplitude_constant[i, j]
                writer.writerow(
                    [i, j, format(sector.delta, ".17g"), format(fitted, ".17g"),
                     format(max_mod[i, j], ".17g")]
                )
