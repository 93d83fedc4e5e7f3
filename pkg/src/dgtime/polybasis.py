"""Reference-interval polynomial machinery for one local step in time.

Degree-r Lagrange bases at the equispaced nodes j/r on [0, 1] (single node 0
for r = 0), Gauss-Legendre quadrature, and the constant matrices that define
the local upwind-in-time Galerkin system:

    K[i, j]  = int_0^1 dphi_j phi_i ds + phi_j(0) phi_i(0)
    Mt[i, j] = int_0^1 phi_j phi_i ds

Supported degrees are 0 <= r <= 4, where the equispaced nodes are well
conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

MAX_DEGREE = 4


def gauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule on [0, 1] (exact to degree 2n - 1)."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _lagrange_values(nodes: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Values phi_i(s), shape (len(s), len(nodes)); exact at the nodes."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    m = nodes.size
    out = np.empty((s.size, m))
    for i in range(m):
        v = np.ones_like(s)
        for j in range(m):
            if j != i:
                v *= (s - nodes[j]) / (nodes[i] - nodes[j])
        out[:, i] = v
    return out


def _lagrange_derivatives(nodes: np.ndarray, s: np.ndarray) -> np.ndarray:
    """First derivatives dphi_i(s), shape (len(s), len(nodes))."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    m = nodes.size
    out = np.zeros((s.size, m))
    for i in range(m):
        for k in range(m):
            if k == i:
                continue
            term = np.ones_like(s) / (nodes[i] - nodes[k])
            for j in range(m):
                if j != i and j != k:
                    term *= (s - nodes[j]) / (nodes[i] - nodes[j])
            out[:, i] += term
    return out


@dataclass(frozen=True)
class ReferenceElement:
    """Immutable degree-r reference data shared by all intervals."""

    r: int
    nodes: np.ndarray
    quad_points: np.ndarray
    quad_weights: np.ndarray
    K: np.ndarray
    Mt: np.ndarray
    Phi0: np.ndarray
    Phi1: np.ndarray

    def __post_init__(self) -> None:
        for name in ("nodes", "quad_points", "quad_weights", "K", "Mt", "Phi0", "Phi1"):
            arr = getattr(self, name)
            arr.setflags(write=False)


@lru_cache(maxsize=None)
def build_reference(r: int) -> ReferenceElement:
    """Assemble nodes, quadrature and the local matrices for degree r."""
    if not 0 <= r <= MAX_DEGREE:
        raise ValueError(f"degree must be in 0..{MAX_DEGREE}")
    nodes = np.array([0.0]) if r == 0 else np.arange(r + 1) / r
    x, w = gauss01(2 * r + 2)
    V = _lagrange_values(nodes, x)        # (Q, r+1)
    D = _lagrange_derivatives(nodes, x)   # (Q, r+1)
    Mt = V.T @ (w[:, None] * V)
    K = V.T @ (w[:, None] * D)            # K[i, j] = int dphi_j phi_i
    Phi0 = _lagrange_values(nodes, np.array([0.0]))[0]
    Phi1 = _lagrange_values(nodes, np.array([1.0]))[0]
    K = K + np.outer(Phi0, Phi0)
    return ReferenceElement(r, nodes, x, w, K, Mt, Phi0, Phi1)


def eval_basis(elem: ReferenceElement, s, derivative_order: int = 0) -> np.ndarray:
    """Evaluate (phi_i(s))_i or (dphi_i(s))_i on the reference interval.

    Chain-rule scaling by 1/tau_n for a physical interval is the caller's
    responsibility.  Accepts a scalar or an array of points; the node axis
    is last.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr < -1e-14) or np.any(s_arr > 1.0 + 1e-14):
        raise ValueError("evaluation point outside [0, 1]")
    if derivative_order == 0:
        vals = _lagrange_values(elem.nodes, s_arr)
    elif derivative_order == 1:
        vals = _lagrange_derivatives(elem.nodes, s_arr)
    else:
        raise ValueError("only derivative orders 0 and 1 are supported")
    return vals[0] if np.isscalar(s) or np.ndim(s) == 0 else vals


def orthonormal_weighted_basis(r: int) -> np.ndarray:
    """Coefficients of polynomials orthonormal under the weight s on [0, 1].

    Returns an (r, r) array whose row j holds the monomial coefficients
    (ascending) of a degree <= r-1 polynomial psi_j, with
    int_0^1 s psi_i(s) psi_j(s) ds = delta_ij.
    """
    if r < 1:
        raise ValueError("need degree r >= 1 (the system spans P^{r-1})")
    # Weighted monomial Gram: int_0^1 s * s^i * s^j ds = 1/(i + j + 2)
    idx = np.arange(r)
    G = 1.0 / (idx[:, None] + idx[None, :] + 2.0)
    # With G = L L^T, the rows of inv(L) orthonormalize the monomials in
    # Gram-Schmidt order (row j has exact degree j).
    L = np.linalg.cholesky(G)
    return np.linalg.inv(L)


def eval_poly_rows(coeffs: np.ndarray, s) -> np.ndarray:
    """Evaluate polynomials given as rows of ascending monomial coefficients."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    powers = s_arr[:, None] ** np.arange(coeffs.shape[1])[None, :]
    vals = powers @ coeffs.T
    return vals[0] if np.ndim(s) == 0 else vals
