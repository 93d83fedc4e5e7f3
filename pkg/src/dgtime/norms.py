"""Broken norms, jump sums, weighted error norms, and stability functionals.

Everything here evaluates the measurable quantities that the experiment
drivers monitor: per-interval L^p-in-time norms of piecewise polynomials and
their derivatives, the scaled jump sums, the weighted error around a marked
time, and the full stability ratio that bounds derivative, operator, and jump
terms by the data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from dgtime import operators
from dgtime.dg_core import PiecewisePoly, eval_time_function, quad_grid
from dgtime.operators import OperatorSpec, interpolation_norm, x_norm_many


@dataclass(frozen=True)
class WeightFn:
    """sqrt((t - center)^2 + tau^2): flat near the marked time, linear far away."""

    center: float
    tau: float

    def __post_init__(self) -> None:
        if self.tau <= 0.0:
            raise ValueError("weight scale must be positive")

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.sqrt((t - self.center) ** 2 + self.tau**2)


@dataclass
class NormReport:
    """Scalar summary of one solved instance."""

    dt_norm: float
    A_norm: float
    jump_norm: float
    rhs_norm: float
    mr_ratio: float
    f_norm: float
    u0_norm: float
    flag: str = ""

    @staticmethod
    def csv_header() -> list[str]:
        return [f.name for f in fields(NormReport)]

    def csv_row(self) -> list[str]:
        out = []
        for f in fields(NormReport):
            val = getattr(self, f.name)
            out.append(val if isinstance(val, str) else format(val, ".17g"))
        return out

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.csv_header())
            writer.writerow(self.csv_row())


def _norms_on_quad(op, values, q):
    flat = values.reshape(-1, values.shape[-1])
    return x_norm_many(op, flat, q).reshape(values.shape[:2])


def broken_norm(
    u: PiecewisePoly,
    p: float,
    derivative_order: int = 0,
    apply_A: OperatorSpec | None = None,
    op: OperatorSpec | None = None,
    q: float = 2.0,
    n_quad: int | None = None,
) -> float:
    """(sum_n int_{J_n} ||u||_X^p dt)^{1/p}, max over quadrature points for p=inf.

    ``apply_A`` applies the operator to the values first; ``op`` only selects
    the spatial norm weights (defaults to apply_A or plain l^q).
    """
    if derivative_order == 0:
        _, wq, vals = u.quad_values(n_quad)
    elif derivative_order == 1:
        _, wq, vals = u.quad_derivative_values(n_quad)
    else:
        raise ValueError("only derivative orders 0 and 1 are supported")
    if apply_A is not None:
        vals = operators.apply(apply_A, vals.reshape(-1, u.dim)).reshape(vals.shape)
    norm_op = op or apply_A or _PLAIN
    pointwise = _norms_on_quad(norm_op, vals, q)
    if p == np.inf:
        return float(pointwise.max())
    if not 1.0 <= p < np.inf:
        raise ValueError("time exponent must lie in [1, inf]")
    return float(((pointwise**p) * wq).sum() ** (1.0 / p))


class _PlainNorm:
    """Stand-in operator carrying only the unweighted l^q norm."""

    kind = "plain"
    dim = None


_PLAIN = _PlainNorm()


def jump_sum(
    u: PiecewisePoly, p: float, op: OperatorSpec | None = None, q: float = 2.0
) -> float:
    """(sum_n ||jump_{n-1} / tau_n||_X^p tau_n)^{1/p} with the stored t=0 trace."""
    jumps = u.jumps()
    tau = u.mesh.tau_n
    norms = x_norm_many(op or _PLAIN, jumps / tau[:, None], q)
    if p == np.inf:
        return float(norms.max())
    return float(((norms**p) * tau).sum() ** (1.0 / p))


def weighted_A_error(
    ref_values: np.ndarray,
    gtau: PiecewisePoly,
    weight: WeightFn,
    alpha: float,
    p: float,
    op: OperatorSpec,
    q: float = 2.0,
    n_quad: int | None = None,
) -> float:
    """||weight^alpha A (ref - gtau)||_{L^p(J; X)} on the shared Gauss grid.

    ``ref_values`` must hold the reference solution at the same quadrature
    points, shape (intervals, points, dim).
    """
    nq = n_quad or ref_values.shape[1]
    tq, wq, vals = gtau.quad_values(nq)
    if ref_values.shape != vals.shape:
        raise ValueError("reference values are not sampled on the matching grid")
    err = operators.apply(op, (ref_values - vals).reshape(-1, gtau.dim)).reshape(vals.shape)
    pointwise = _norms_on_quad(op, err, q) * weight(tq) ** alpha
    if p == np.inf:
        return float(pointwise.max())
    return float(((pointwise**p) * wq).sum() ** (1.0 / p))


def lp_distance(
    u: PiecewisePoly,
    fn,
    p: float,
    derivative_order: int = 0,
    op: OperatorSpec | None = None,
    q: float = 2.0,
    n_quad: int | None = None,
) -> float:
    """L^p(J; X) distance between a piecewise polynomial and a time function.

    With ``derivative_order=1`` the polynomial's derivative is compared, and
    ``fn`` must supply the derivative values.
    """
    if derivative_order == 0:
        tq, wq, vals = u.quad_values(n_quad)
    else:
        tq, wq, vals = u.quad_derivative_values(n_quad)
    fv = eval_time_function(fn, tq.ravel(), u.dim).reshape(vals.shape)
    pointwise = _norms_on_quad(op or _PLAIN, vals - fv, q)
    if p == np.inf:
        return float(pointwise.max())
    return float(((pointwise**p) * wq).sum() ** (1.0 / p))


def residual_values(u, f, op, n_quad=None):
    """du/dt + A u - f on the quadrature grid, shape (N, Q, M)."""
    tq, wq, vals = u.quad_values(n_quad)
    _, _, dvals = u.quad_derivative_values(n_quad)
    avals = operators.apply(op, vals.reshape(-1, u.dim)).reshape(vals.shape)
    res = dvals + avals
    if f is not None:
        if isinstance(f, PiecewisePoly):
            _, _, fvals = f.quad_values(n_quad)
        else:
            fvals = eval_time_function(f, tq.ravel(), u.dim).reshape(vals.shape)
        res = res - fvals
    return tq, wq, res


def jump_residual_pair(
    u: PiecewisePoly, f, op: OperatorSpec, p: float, q: float = 2.0, n_quad: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Per interval: scaled jump norms and residual L^p norms.

    The scheme forces each scaled jump to sit below the interval residual
    norm with constant one; callers assert exactly that.
    """
    jumps = u.jumps()
    tau = u.mesh.tau_n
    lhs = x_norm_many(op, jumps / tau[:, None], q) * tau ** (1.0 / p)
    _, wq, res = residual_values(u, f, op, n_quad)
    pointwise = _norms_on_quad(op, res, q)
    if p == np.inf:
        rhs = pointwise.max(axis=1)
    else:
        rhs = ((pointwise**p) * wq).sum(axis=1) ** (1.0 / p)
    return lhs, rhs


def dt_vs_residual_ratios(
    u: PiecewisePoly, f, op: OperatorSpec, p: float, q: float = 2.0, n_quad: int | None = None
) -> np.ndarray:
    """Per-interval ||du/dt|| / ||A u - f|| in L^p(J_n; X); NaN where both vanish."""
    _, wq, dvals = u.quad_derivative_values(n_quad)
    num_pw = _norms_on_quad(op, dvals, q)
    tq, _, vals = u.quad_values(n_quad)
    avals = operators.apply(op, vals.reshape(-1, u.dim)).reshape(vals.shape)
    if f is not None:
        if isinstance(f, PiecewisePoly):
            _, _, fvals = f.quad_values(n_quad)
        else:
            fvals = eval_time_function(f, tq.ravel(), u.dim).reshape(vals.shape)
        avals = avals - fvals
    den_pw = _norms_on_quad(op, avals, q)
    if p == np.inf:
        num, den = num_pw.max(axis=1), den_pw.max(axis=1)
    else:
        num = ((num_pw**p) * wq).sum(axis=1) ** (1.0 / p)
        den = ((den_pw**p) * wq).sum(axis=1) ** (1.0 / p)
    scale = max(den.max(), 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(den > 1e-14 * scale, num / den, np.nan)
    return ratios


def mr_functional(
    u: PiecewisePoly,
    f,
    u0,
    op: OperatorSpec,
    p: float,
    q: float = 2.0,
    n_quad: int | None = None,
) -> NormReport:
    """Assemble the stability functional of one solved instance."""
    u0 = operators.as_values(u0)
    dt_norm = broken_norm(u, p, derivative_order=1, op=op, q=q, n_quad=n_quad)
    a_norm = broken_norm(u, p, apply_A=op, q=q, n_quad=n_quad)
    j_norm = jump_sum(u, p, op=op, q=q)
    if f is None:
        f_norm = 0.0
    elif isinstance(f, PiecewisePoly):
        f_norm = broken_norm(f, p, op=op, q=q, n_quad=n_quad)
    else:
        tq, wq, _ = u.quad_values(n_quad)
        fv = eval_time_function(f, tq.ravel(), u.dim).reshape(tq.shape + (u.dim,))
        pw = _norms_on_quad(op, fv, q)
        f_norm = float(((pw**p) * wq).sum() ** (1.0 / p)) if p != np.inf else float(pw.max())
    u0_norm = 0.0 if not np.any(u0) else interpolation_norm(op, u0, p, q=q)
    rhs = f_norm + u0_norm
    lhs = dt_norm + a_norm + j_norm
    if rhs == 0.0:
        flag = "" if lhs <= 1e-12 else "zero-data-nonzero-solution"
        ratio = np.nan
        if flag:
            flag = "scheme violation: " + flag
    else:
        flag = ""
        ratio = lhs / rhs
    return NormReport(dt_norm, a_norm, j_norm, rhs, ratio, f_norm, u0_norm, flag)


def one_step_functional(
    u: PiecewisePoly, op: OperatorSpec, p: float, q: float = 2.0
) -> tuple[float, float]:
    """Trace-level pair: scaled trace increments and operator values at traces."""
    if u.initial_trace is None:
        raise ValueError("one-step functional needs the stored initial trace")
    right = u.right_traces()
    below = np.vstack([u.initial_trace[None, :], right[:-1]])
    tau = u.mesh.tau_n
    inc = x_norm_many(op, (right - below) / tau[:, None], q)
    aval = x_norm_many(op, operators.apply(op, right), q)
    if p == np.inf:
        return float(inc.max()), float(aval.max())
    return (
        float(((inc**p) * tau).sum() ** (1.0 / p)),
        float(((aval**p) * tau).sum() ** (1.0 / p)),
    )
