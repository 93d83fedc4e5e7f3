"""Time-stepping solvers with discontinuous piecewise polynomials.

The primal sweep solves u' + A u = f interval by interval through the local
system

    sum_j (K[i, j] I + tau_n Mt[i, j] A) U_j = int_{J_n} f phi_i dt + Phi0_i u_prev,

whose upwind jump term is baked into K.  The dual (backward) scheme is
realized by time reversal of the primal sweep on the adjoint operator.  The
module also provides the endpoint/moment interpolation onto piecewise
polynomials, a smooth interval-supported source that reproduces point values
against polynomials (used to probe single times), and high-accuracy spectral
reference solutions for such sources.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from dgtime import operators
from dgtime.operators import OperatorSpec, as_values
from dgtime.polybasis import (
    ReferenceElement,
    _lagrange_values,
    build_reference,
    gauss01,
)
from dgtime.temporal_mesh import TemporalMesh


class DGSolveError(RuntimeError):
    """Raised when a local block system is singular or out of tolerance."""


# -- piecewise polynomial states --------------------------------------------

@dataclass
class PiecewisePoly:
    """Nodal coefficients of a piecewise polynomial in time.

    ``coeffs`` has shape (intervals, r + 1, state dimension); entry
    ``coeffs[n, j]`` multiplies the local basis function phi_j on interval n.
    ``initial_trace`` stores the incoming value below t = 0 when one exists
    (solutions carry it, raw test functions need not).
    """

    mesh: TemporalMesh
    r: int
    coeffs: np.ndarray
    initial_trace: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        N = self.mesh.n_intervals
        if self.coeffs.shape[:2] != (N, self.r + 1):
            raise ValueError("coefficient array does not match mesh and degree")
        if self.initial_trace is not None:
            self.initial_trace = np.asarray(self.initial_trace, dtype=float)
            if self.initial_trace.shape != (self.dim,):
                raise ValueError("initial trace dimension mismatch")

    @property
    def dim(self) -> int:
        return self.coeffs.shape[2]

    @property
    def elem(self) -> ReferenceElement:
        return build_reference(self.r)

    def _local(self, t) -> tuple[np.ndarray, np.ndarray]:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = self.mesh.interval_of(t)
        s = (t - self.mesh.breakpoints[idx]) / self.mesh.tau_n[idx]
        return idx, np.clip(s, 0.0, 1.0)

    def eval(self, t) -> np.ndarray:
        """Values at times t; interior breakpoints give the right limit."""
        idx, s = self._local(t)
        basis = _lagrange_values(self.elem.nodes, s)          # (T, r+1)
        vals = np.einsum("tj,tjm->tm", basis, self.coeffs[idx])
        return vals[0] if np.ndim(t) == 0 else vals

    def eval_derivative(self, t) -> np.ndarray:
        from dgtime.polybasis import _lagrange_derivatives

        idx, s = self._local(t)
        basis = _lagrange_derivatives(self.elem.nodes, s) / self.mesh.tau_n[idx][:, None]
        vals = np.einsum("tj,tjm->tm", basis, self.coeffs[idx])
        return vals[0] if np.ndim(t) == 0 else vals

    def left_traces(self) -> np.ndarray:
        """v^{n-1,+} per interval: the value just above each left breakpoint."""
        return np.einsum("j,njm->nm", self.elem.Phi0, self.coeffs)

    def right_traces(self) -> np.ndarray:
        """v^{n,-} per interval: the value just below each right breakpoint."""
        return np.einsum("j,njm->nm", self.elem.Phi1, self.coeffs)

    def jumps(self) -> np.ndarray:
        """All jumps v^{k,+} - v^{k,-} for k = 0..N-1 (needs the initial trace)."""
        if self.initial_trace is None:
            raise ValueError("jumps at t=0 need the stored initial trace")
        left = self.left_traces()
        below = np.vstack([self.initial_trace[None, :], self.right_traces()[:-1]])
        return left - below

    def __sub__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        if self.r != other.r or self.mesh is not other.mesh and not np.array_equal(
            self.mesh.breakpoints, other.mesh.breakpoints
        ):
            raise ValueError("operands live on different spaces")
        trace = None
        if self.initial_trace is not None and other.initial_trace is not None:
            trace = self.initial_trace - other.initial_trace
        return PiecewisePoly(self.mesh, self.r, self.coeffs - other.coeffs, trace)

    # -- quadrature sampling -------------------------------------------------

    def quad_values(self, n_quad: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(times, weights, values) on a per-interval Gauss grid.

        Shapes (N, Q), (N, Q), (N, Q, M); weights include interval lengths.
        """
        tq, wq, s = quad_grid(self.mesh, n_quad or (2 * self.r + 2))
        basis = _lagrange_values(self.elem.nodes, s)
        vals = np.einsum("qj,njm->nqm", basis, self.coeffs)
        return tq, wq, vals

    def quad_derivative_values(self, n_quad: int | None = None):
        from dgtime.polybasis import _lagrange_derivatives

        tq, wq, s = quad_grid(self.mesh, n_quad or (2 * self.r + 2))
        basis = _lagrange_derivatives(self.elem.nodes, s)
        vals = np.einsum("qj,njm->nqm", basis, self.coeffs) / self.mesh.tau_n[:, None, None]
        return tq, wq, vals

    # -- plain-text serialization ---------------------------------------------

    def dump(self, path: str | Path) -> None:
        """Per interval: the breakpoint pair, then r+1 coefficient rows."""
        lines = [f"{self.mesh.n_intervals} {self.r} {self.dim} {int(self.initial_trace is not None)}"]
        if self.initial_trace is not None:
            lines.append(" ".join(format(x, ".17g") for x in self.initial_trace))
        for n in range(self.mesh.n_intervals):
            a, b = self.mesh.breakpoints[n], self.mesh.breakpoints[n + 1]
            lines.append(f"{a:.17g} {b:.17g}")
            for j in range(self.r + 1):
                lines.append(" ".join(format(x, ".17g") for x in self.coeffs[n, j]))
        Path(path).write_text("\n".join(lines) + "\n")

    @staticmethod
    def load(path: str | Path) -> "PiecewisePoly":
        rows = Path(path).read_text().splitlines()
        N, r, dim, has_trace = (int(x) for x in rows[0].split())
        pos = 1
        trace = None
        if has_trace:
            trace = np.array([float(x) for x in rows[pos].split()])
            pos += 1
        breakpoints = [0.0]
        coeffs = np.empty((N, r + 1, dim))
        for n in range(N):
            a, b = (float(x) for x in rows[pos].split())
            breakpoints.append(b)
            pos += 1
            for j in range(r + 1):
                coeffs[n, j] = [float(x) for x in rows[pos].split()]
                pos += 1
        return PiecewisePoly(TemporalMesh(np.array(breakpoints)), r, coeffs, trace)


def quad_grid(mesh: TemporalMesh, n_quad: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-interval Gauss points/weights on the mesh plus the reference nodes."""
    s, w = gauss01(n_quad)
    tq = mesh.breakpoints[:-1, None] + mesh.tau_n[:, None] * s[None, :]
    wq = mesh.tau_n[:, None] * w[None, :]
    return tq, wq, s


def random_piecewise_poly(
    mesh: TemporalMesh, r: int, dim: int, rng: np.random.Generator, initial_trace: bool = False
) -> PiecewisePoly:
    """Independent standard-normal nodal coefficients on every interval."""
    coeffs = rng.standard_normal((mesh.n_intervals, r + 1, dim))
    trace = rng.standard_normal(dim) if initial_trace else None
    return PiecewisePoly(mesh, r, coeffs, trace)


# -- the local step and the sweeping solvers --------------------------------

def _solve_block(op, elem, tau, rhs_blocks):
    """Solve the (r+1) x (r+1) block system; rhs_blocks has shape (r+1, M)."""
    r1 = elem.K.shape[0]
    if op.kind == "diagonal":
        lam = op.eigenvalues
        A = elem.K[None, :, :] + tau * lam[:, None, None] * elem.Mt[None, :, :]
        try:
            U = np.linalg.solve(A, rhs_blocks.T[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError as exc:
            raise DGSolveError(f"singular local system at tau={tau}") from exc
        coeff = U.T
        residual = np.einsum("mij,mj->mi", A, U) - rhs_blocks.T
    else:
        if op.kind == "dense":
            big = np.kron(elem.K, np.eye(op.dim)) + tau * np.kron(elem.Mt, op.matrix)
            rhs = rhs_blocks.reshape(-1)
        else:
            big = np.kron(elem.K, op.mass) + tau * np.kron(elem.Mt, op.stiffness)
            rhs = (rhs_blocks @ op.mass.T).reshape(-1)
        try:
            flat = np.linalg.solve(big, rhs)
        except np.linalg.LinAlgError as exc:
            raise DGSolveError(f"singular local system at tau={tau}") from exc
        coeff = flat.reshape(r1, op.dim)
        residual = (big @ flat - rhs).reshape(r1, op.dim)
    scale = np.linalg.norm(rhs_blocks)
    rel = np.linalg.norm(residual) / max(scale, 1e-300)
    if not np.isfinite(rel) or rel > 1e-10:
        raise DGSolveError(
            f"local solve residual {rel:.2e} exceeds tolerance at tau={tau} ({op.kind})"
        )
    return coeff


def dg_step(
    op: OperatorSpec,
    elem: ReferenceElement,
    tau_n: float,
    u_prev,
    f_moments,
) -> np.ndarray:
    """One interval update; returns the r+1 nodal coefficient vectors.

    ``f_moments[i]`` holds int_{J_n} f phi_i dt.  For fem1d operators the
    moments are given in state coordinates and weighted internally by the
    mass matrix.
    """
    if tau_n <= 0.0:
        raise ValueError("interval length must be positive")
    u_prev = as_values(u_prev)
    moments = np.asarray(f_moments, dtype=float)
    if moments.shape != (elem.K.shape[0], op.dim) or u_prev.shape != (op.dim,):
        raise ValueError("inconsistent dimensions in local step")
    rhs = moments + np.outer(elem.Phi0, u_prev)
    return _solve_block(op, elem, tau_n, rhs)


def _f_moments(mesh, elem, f, dim, n_quad, oversample):
    """Per-interval load moments int f phi_i dt, shape (N, r+1, M)."""
    if f is None:
        return np.zeros((mesh.n_intervals, elem.K.shape[0], dim))
    if isinstance(f, PiecewisePoly):
        # exact: int f phi_i dt = tau_n * Mt @ f-coeffs
        return mesh.tau_n[:, None, None] * np.einsum("ij,njm->nim", elem.Mt, f.coeffs)
    q = max(n_quad, 1) * max(oversample, 1)
    tq, wq, s = quad_grid(mesh, q)
    basis = _lagrange_values(elem.nodes, s)                # (Q, r+1)
    fv = eval_time_function(f, tq.ravel(), dim).reshape(tq.shape + (dim,))
    return np.einsum("qi,nq,nqm->nim", basis, wq, fv)


def eval_time_function(f, t: np.ndarray, dim: int) -> np.ndarray:
    """Evaluate a time function at an array of times, returning (T, dim)."""
    t = np.asarray(t, dtype=float)
    out = f(t)
    out = np.asarray(out, dtype=float)
    if out.shape == t.shape + (dim,):
        return out
    if out.shape == t.shape and dim == 1:
        return out[:, None]
    # fall back to pointwise evaluation
    vals = np.empty((t.size, dim))
    for k, tk in enumerate(t.ravel()):
        vals[k] = np.atleast_1d(f(tk))
    return vals.reshape(t.shape + (dim,))


def solve_primal(
    op: OperatorSpec,
    mesh: TemporalMesh,
    r: int,
    f,
    u0,
    n_quad: int | None = None,
    oversample: int = 1,
) -> PiecewisePoly:
    """Sweep the mesh from t = 0; f may be None, a callable, or piecewise."""
    elem = build_reference(r)
    u0 = as_values(u0)
    if u0.shape != (op.dim,):
        raise ValueError("initial value dimension mismatch")
    moments = _f_moments(mesh, elem, f, op.dim, n_quad or (2 * r + 2), oversample)
    return solve_primal_moments(op, mesh, r, moments, u0)


def solve_primal_moments(
    op: OperatorSpec, mesh: TemporalMesh, r: int, moments: np.ndarray, u0
) -> PiecewisePoly:
    """Sweep using precomputed load moments of shape (N, r+1, M)."""
    elem = build_reference(r)
    u0 = as_values(u0)
    coeffs = np.empty((mesh.n_intervals, r + 1, op.dim))
    u_prev = u0
    factor_cache: dict = {}
    for n in range(mesh.n_intervals):
        tau = float(mesh.tau_n[n])
        rhs = moments[n] + np.outer(elem.Phi0, u_prev)
        try:
            coeffs[n] = _solve_block_cached(op, elem, tau, rhs, factor_cache)
        except DGSolveError as exc:
            raise DGSolveError(f"interval {n}: {exc}") from exc
        u_prev = coeffs[n].T @ elem.Phi1
    return PiecewisePoly(mesh, r, coeffs, initial_trace=u0.copy())


def _solve_block_cached(op, elem, tau, rhs_blocks, cache):
    if op.kind == "diagonal":
        return _solve_block(op, elem, tau, rhs_blocks)
    key = tau
    if key not in cache:
        if op.kind == "dense":
            big = np.kron(elem.K, np.eye(op.dim)) + tau * np.kron(elem.Mt, op.matrix)
        else:
            big = np.kron(elem.K, op.mass) + tau * np.kron(elem.Mt, op.stiffness)
        try:
            cache[key] = (big, scipy.linalg.lu_factor(big))
        except scipy.linalg.LinAlgError as exc:
            raise DGSolveError(f"singular local system at tau={tau}") from exc
    big, factor = cache[key]
    rhs = rhs_blocks.reshape(-1) if op.kind == "dense" else (rhs_blocks @ op.mass.T).reshape(-1)
    flat = scipy.linalg.lu_solve(factor, rhs)
    rel = np.linalg.norm(big @ flat - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if not np.isfinite(rel) or rel > 1e-10:
        raise DGSolveError(f"local solve residual {rel:.2e} exceeds tolerance at tau={tau}")
    return flat.reshape(elem.K.shape[0], op.dim)


def reverse_mesh(mesh: TemporalMesh) -> TemporalMesh:
    T = mesh.T
    return TemporalMesh(T - mesh.breakpoints[::-1])


def solve_dual(
    op: OperatorSpec,
    mesh: TemporalMesh,
    r: int,
    rhs,
    terminal,
    n_quad: int | None = None,
    oversample: int = 1,
) -> PiecewisePoly:
    """Backward scheme -gamma' + A' gamma = rhs with gamma^{N,+} = terminal.

    Realized as a primal sweep for the adjoint operator in reversed time;
    the identity between the forward and backward bilinear forms makes the
    two formulations equivalent.
    """
    T = mesh.T
    rmesh = reverse_mesh(mesh)
    op_adj = operators.adjoint(op)
    if rhs is None:
        reversed_rhs = None
    elif isinstance(rhs, PiecewisePoly):
        raise TypeError("pass the dual load as a callable of time")
    else:
        def reversed_rhs(t):
            return rhs(T - np.asarray(t, dtype=float))

    back = solve_primal(op_adj, rmesh, r, reversed_rhs, terminal, n_quad, oversample)
    # map to the original mesh: interval n <- reversed interval N-1-n with the
    # local coordinate flipped; equispaced nodes give phi_j(1-s) = phi_{r-j}(s)
    coeffs = back.coeffs[::-1, ::-1, :].copy()
    return PiecewisePoly(mesh, r, coeffs, initial_trace=None)


# -- endpoint/moment interpolation ------------------------------------------

def interpolation_matrix(elem: ReferenceElement) -> tuple[np.ndarray, np.ndarray]:
    """(system, lowdeg_nodes): moment rows against the degree r-1 basis plus
    the right-endpoint row, on the reference interval."""
    r = elem.r
    if r == 0:
        return elem.Phi1[None, :].copy(), np.array([0.0])
    nodes_lo = np.array([0.0]) if r == 1 else np.arange(r) / (r - 1)
    x, w = gauss01(2 * r + 2)
    lo = _lagrange_values(nodes_lo, x)        # (Q, r)
    hi = _lagrange_values(elem.nodes, x)      # (Q, r+1)
    system = np.empty((r + 1, r + 1))
    system[:r] = lo.T @ (w[:, None] * hi)
    system[r] = elem.Phi1
    return system, nodes_lo


def interpolate(
    mesh: TemporalMesh,
    r: int,
    v,
    dim: int | None = None,
    n_quad: int | None = None,
    oversample: int = 1,
) -> PiecewisePoly:
    """Piecewise interpolant matching right endpoint values and moments
    against polynomials one degree lower; reproduces degree <= r exactly."""
    elem = build_reference(r)
    if dim is None:
        probe = np.atleast_1d(np.asarray(v(np.array([mesh.T]))))
        dim = probe.reshape(-1).size
    system, nodes_lo = interpolation_matrix(elem)
    q = max(n_quad or (2 * r + 2), 1) * max(oversample, 1)
    tq, wq, s = quad_grid(mesh, q)
    vv = eval_time_function(v, tq.ravel(), dim).reshape(tq.shape + (dim,))
    end_vals = eval_time_function(v, mesh.breakpoints[1:], dim)
    rhs = np.empty((mesh.n_intervals, r + 1, dim))
    if r >= 1:
        lo = _lagrange_values(nodes_lo, s)    # (Q, r)
        _, w01 = gauss01(q)
        rhs[:, :r, :] = np.einsum("qk,q,nqm->nkm", lo, w01, vv)
    rhs[:, r, :] = end_vals
    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > 1e12:
        raise DGSolveError("interpolation system unexpectedly ill-conditioned")
    coeffs = np.linalg.solve(system, rhs.reshape(mesh.n_intervals, r + 1, dim))
    trace0 = eval_time_function(v, np.array([0.0]), dim)[0]
    return PiecewisePoly(mesh, r, coeffs, initial_trace=trace0)


# -- regularized point source -------------------------------------------------

def _bump(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > 0.0) & (s < 1.0)
    g = s[inside] * (1.0 - s[inside])
    with np.errstate(over="ignore"):
        out[inside] = np.exp(-1.0 / g)
    return out


def _bump_derivative(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > 0.0) & (s < 1.0)
    si = s[inside]
    g = si * (1.0 - si)
    with np.errstate(over="ignore"):
        out[inside] = np.exp(-1.0 / g) * (1.0 - 2.0 * si) / g**2
    return out


@dataclass
class Mollifier:
    """Smooth function supported in one interval that reproduces point values
    at ``t_center`` when integrated against polynomials of degree <= r."""

    mesh: TemporalMesh
    r: int
    interval: int
    t_center: float
    poly_coeffs: np.ndarray   # coefficients in the interval's Lagrange basis

    @property
    def t_lo(self) -> float:
        return float(self.mesh.breakpoints[self.interval])

    @property
    def t_hi(self) -> float:
        return float(self.mesh.breakpoints[self.interval + 1])

    @property
    def width(self) -> float:
        return self.t_hi - self.t_lo

    def __call__(self, t, derivative_order: int = 0) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        s = (t - self.t_lo) / self.width
        nodes = build_reference(self.r).nodes
        basis = _lagrange_values(nodes, np.atleast_1d(s).ravel())
        P = basis @ self.poly_coeffs
        if derivative_order == 0:
            vals = _bump(np.atleast_1d(s).ravel()) * P / self.width
        elif derivative_order == 1:
            from dgtime.polybasis import _lagrange_derivatives

            dbasis = _lagrange_derivatives(nodes, np.atleast_1d(s).ravel())
            dP = dbasis @ self.poly_coeffs
            sr = np.atleast_1d(s).ravel()
            vals = (_bump_derivative(sr) * P + _bump(sr) * dP) / self.width**2
        else:
            raise ValueError("only derivative orders 0 and 1 are supported")
        vals = vals.reshape(np.shape(s))
        return float(vals) if np.ndim(t) == 0 else vals

    def moment_errors(self) -> np.ndarray:
        """max_i |int delta L_i dt - L_i(t_center)| with an independent rule."""
        s, w = composite_gauss01(25, 16)
        nodes = build_reference(self.r).nodes
        basis = _lagrange_values(nodes, s)
        delta_vals = self(self.t_lo + s * self.width)
        approx = (basis * (w * delta_vals)[:, None]).sum(axis=0) * self.width
        s_center = (self.t_center - self.t_lo) / self.width
        exact = _lagrange_values(nodes, np.array([s_center]))[0]
        return np.abs(approx - exact)

    def lp_norm(self, p: float, derivative_order: int = 0) -> float:
        """Measured norm over the support, fine composite quadrature."""
        s, w = composite_gauss01(25, 16)
        t = self.t_lo + s * self.width
        vals = np.abs(self(t, derivative_order))
        if p == np.inf:
            return float(vals.max())
        return float(((vals**p) @ w * self.width) ** (1.0 / p))


def composite_gauss01(panels: int, points: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on [0, 1] with the given panel count."""
    x, w = gauss01(points)
    edges = np.linspace(0.0, 1.0, panels + 1)
    width = 1.0 / panels
    nodes = (edges[:-1, None] + width * x[None, :]).ravel()
    weights = np.tile(width * w, panels)
    return nodes, weights


def make_mollifier(mesh: TemporalMesh, r: int, interval: int, t_center: float) -> Mollifier:
    """Solve the weighted moment system on the chosen interval."""
    if not 0 <= interval < mesh.n_intervals:
        raise ValueError("interval index out of range")
    t_lo = mesh.breakpoints[interval]
    t_hi = mesh.breakpoints[interval + 1]
    if not t_lo < t_center < t_hi:
        raise ValueError("center time must lie strictly inside the interval")
    nodes = build_reference(r).nodes
    s, w = composite_gauss01(12, 16)
    basis = _lagrange_values(nodes, s)                   # (Q, r+1)
    weighted = (_bump(s) * w)[:, None] * basis
    gram = basis.T @ weighted                            # SPD: positive weight
    s_center = (t_center - t_lo) / (t_hi - t_lo)
    target = _lagrange_values(nodes, np.array([s_center]))[0]
    coeffs = np.linalg.solve(gram, target)
    return Mollifier(mesh, r, interval, float(t_center), coeffs)


# -- spectral reference for mollified sources --------------------------------

@dataclass
class DuhamelReference:
    """Backward-problem solution -gamma' + A gamma = delta(t) phi, gamma(T) = 0,
    evaluated mode by mode with composite Gauss quadrature against delta."""

    op: OperatorSpec
    delta: Mollifier
    phi: np.ndarray
    panels: int = 24
    points: int = 12

    def __post_init__(self) -> None:
        if not self.op.is_self_adjoint:
            raise ValueError("spectral reference needs a self-adjoint operator")
        w, V, Vinv = self.op.spectral()
        self._lam = w
        self._V = V
        self._phi_modal = Vinv @ np.asarray(self.phi, dtype=float)

    def modal_eval(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        lam = self._lam
        out = np.zeros((t.size, lam.size))
        t_lo, t_hi = self.delta.t_lo, self.delta.t_hi
        x, w = gauss01(self.points)
        inside = (t < t_hi) & (t >= t_lo)
        below = t < t_lo
        for k in np.nonzero(inside)[0]:
            a = t[k]
            edges = np.linspace(a, t_hi, self.panels + 1)
            width = (t_hi - a) / self.panels
            nodes = (edges[:-1, None] + width * x[None, :]).ravel()
            dv = self.delta(nodes)
            expo = np.exp(-np.outer(nodes - a, lam))
            out[k] = np.einsum("q,qm->m", dv * np.tile(width * w, self.panels), expo)
        if np.any(below):
            edge_val = self._modal_at_lo()
            gap = t_lo - t[below]
            out[below] = edge_val[None, :] * np.exp(-np.outer(gap, lam))
        return out * self._phi_modal[None, :]

    def _modal_at_lo(self) -> np.ndarray:
        x, w = gauss01(self.points)
        t_lo, t_hi = self.delta.t_lo, self.delta.t_hi
        edges = np.linspace(t_lo, t_hi, self.panels + 1)
        width = (t_hi - t_lo) / self.panels
        nodes = (edges[:-1, None] + width * x[None, :]).ravel()
        dv = self.delta(nodes)
        expo = np.exp(-np.outer(nodes - t_lo, self._lam))
        return np.einsum("q,qm->m", dv * np.tile(width * w, self.panels), expo)

    def eval(self, t) -> np.ndarray:
        """State values, shape (len(t), dim)."""
        modal = self.modal_eval(t)
        vals = modal @ self._V.T
        return vals[0] if np.ndim(t) == 0 else vals

    def apply_a_eval(self, t) -> np.ndarray:
        """A gamma(t), evaluated spectrally."""
        modal = self.modal_eval(t) * self._lam[None, :]
        vals = modal @ self._V.T
        return vals[0] if np.ndim(t) == 0 else vals

    def refined(self, factor: int = 2) -> "DuhamelReference":
        return DuhamelReference(self.op, self.delta, self.phi, self.panels * factor, self.points)

    def coarsened(self, factor: int = 2) -> "DuhamelReference":
        return DuhamelReference(self.op, self.delta, self.phi, max(self.panels // factor, 1), self.points)


def greens_pair(
    op: OperatorSpec,
    mesh: TemporalMesh,
    r: int,
    interval: int,
    t_center: float,
    phi,
) -> tuple[DuhamelReference, PiecewisePoly]:
    """Reference and discrete solutions of the backward mollified problem.

    The discrete side is the backward sweep whose load moments are exact:
    integrating the source against local polynomials reproduces their value
    at the center time, and every other interval carries zero load.
    """
    phi = as_values(phi)
    delta = make_mollifier(mesh, r, interval, t_center)
    ref = DuhamelReference(op, delta, phi)

    N = mesh.n_intervals
    rmesh = reverse_mesh(mesh)
    elem = build_reference(r)
    moments = np.zeros((N, r + 1, op.dim))
    rev_interval = N - 1 - interval
    s_center_rev = (mesh.breakpoints[interval + 1] - t_center) / mesh.tau_n[interval]
    basis_at_center = _lagrange_values(elem.nodes, np.array([s_center_rev]))[0]
    moments[rev_interval] = np.outer(basis_at_center, phi)
    back = solve_primal_moments(operators.adjoint(op), rmesh, r, moments, np.zeros(op.dim))
    gtau = PiecewisePoly(mesh, r, back.coeffs[::-1, ::-1, :].copy(), initial_trace=None)
    return ref, gtau


# -- bilinear forms of the scheme (verification machinery) -------------------

def primal_form(op: OperatorSpec, v: PiecewisePoly, phi: PiecewisePoly, n_quad: int | None = None) -> float:
    """Forward form: volume terms, interior upwind jumps, and the t=0 trace."""
    q = n_quad or (v.r + phi.r + 2)
    _, wq, vv = v.quad_values(q)
    _, _, dv = v.quad_derivative_values(q)
    _, _, pv = phi.quad_values(q)
    av = operators.apply(op, vv.reshape(-1, v.dim)).reshape(vv.shape)
    total = _pair_sum(op, dv + av, pv, wq)
    v_left, v_right = v.left_traces(), v.right_traces()
    p_left = phi.left_traces()
    for k in range(1, v.mesh.n_intervals):
        total += operators.pairing(op, v_left[k] - v_right[k - 1], p_left[k])
    total += operators.pairing(op, v_left[0], p_left[0])
    return float(total)


def dual_form(op: OperatorSpec, v: PiecewisePoly, phi: PiecewisePoly, n_quad: int | None = None) -> float:
    """Backward form: the adjoint volume terms, interior jumps of the test
    argument, and the t=T trace."""
    q = n_quad or (v.r + phi.r + 2)
    _, wq, vv = v.quad_values(q)
    _, _, pv = phi.quad_values(q)
    _, _, dp = phi.quad_derivative_values(q)
    ap = operators.apply(operators.adjoint(op), pv.reshape(-1, phi.dim)).reshape(pv.shape)
    total = _pair_sum(op, vv, -dp + ap, wq)
    v_right = v.right_traces()
    p_left, p_right = phi.left_traces(), phi.right_traces()
    for k in range(1, v.mesh.n_intervals):
        total -= operators.pairing(op, v_right[k - 1], p_left[k] - p_right[k - 1])
    total += operators.pairing(op, v_right[-1], p_right[-1])
    return float(total)


def _pair_sum(op, left, right, wq):
    if op.kind == "fem1d":
        inner = np.einsum("nqm,mk,nqk->nq", left, op.mass, right)
    else:
        inner = np.einsum("nqm,nqm->nq", left, right)
    return float((inner * wq).sum())
