"""Temporal partitions of (0, T): uniform and quasi-uniform mesh families.

A mesh is a strictly increasing sequence of breakpoints 0 = t_0 < ... < t_N = T.
Interval n (0-based) is J_n = (t[n], t[n+1]); membership queries use the
half-open convention [t[n], t[n+1]) except the last interval, which is closed
at T, so every point of [0, T] belongs to exactly one interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class TemporalMesh:
    """Partition of (0, T) with per-interval lengths and quasi-uniformity data."""

    breakpoints: np.ndarray
    tau_n: np.ndarray = field(init=False)
    tau: float = field(init=False)
    quasi_uniformity_constant: float = field(init=False)

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("mesh needs at least two breakpoints")
        if bp[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if bp[-1] <= 0.0:
            raise ValueError("final time must be positive")
        tau_n = np.diff(bp)
        if np.any(tau_n <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        bp = bp.copy()
        bp.setflags(write=False)
        tau_n.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "tau_n", tau_n)
        object.__setattr__(self, "tau", float(tau_n.max()))
        object.__setattr__(
            self, "quasi_uniformity_constant", float(tau_n.min() / tau_n.max())
        )

    @property
    def n_intervals(self) -> int:
        return self.breakpoints.size - 1

    @property
    def T(self) -> float:
        return float(self.breakpoints[-1])

    def interval_of(self, t) -> np.ndarray:
        """Index of the interval containing t (half-open; last one closed at T)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > self.T):
            raise ValueError("time outside [0, T]")
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return np.clip(idx, 0, self.n_intervals - 1)

    def is_quasi_uniform(self, c: float) -> bool:
        """Whether tau_n >= c * tau holds on every interval."""
        return bool(np.all(self.tau_n >= c * self.tau))

    def to_text(self, path: str | Path) -> None:
        """One breakpoint per line, 17 significant digits (round-trippable)."""
        lines = [format(t, ".17g") for t in self.breakpoints]
        Path(path).write_text("\n".join(lines) + "\n")

    @staticmethod
    def from_text(path: str | Path) -> "TemporalMesh":
        values = [float(s) for s in Path(path).read_text().split()]
        return TemporalMesh(np.asarray(values))


def make_uniform(T: float, N: int) -> TemporalMesh:
    """Uniform partition of (0, T) into N intervals."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    if T <= 0.0:
        raise ValueError("T must be positive")
    return TemporalMesh(T * np.arange(N + 1) / N)


def make_quasi_uniform(T: float, N: int, c: float, seed: int) -> TemporalMesh:
    """Random mesh with min tau_n >= c * max tau_n, deterministic for a seed.

    Interval weights are drawn uniformly from [c, 1], floored at c times the
    largest draw (a no-op up to rounding) and normalized to sum to T.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    if T <= 0.0:
        raise ValueError("T must be positive")
    if not 0.0 < c <= 1.0:
        raise ValueError("quasi-uniformity constant must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    w = rng.uniform(c, 1.0, size=N)
    w = np.maximum(w, c * w.max())
    tau = w * (T / w.sum())
    bp = np.concatenate(([0.0], np.cumsum(tau)))
    bp[-1] = T
    mesh = TemporalMesh(bp)
    if not mesh.is_quasi_uniform(c):
        # cumulative-sum rounding nudged a ratio below c; re-floor and rebuild
        tau = np.diff(mesh.breakpoints)
        tau = np.maximum(tau, c * tau.max() / (1.0 - 1e-12))
        bp = np.concatenate(([0.0], np.cumsum(tau * (T / tau.sum()))))
        bp[-1] = T
        mesh = TemporalMesh(bp)
    return mesh


@dataclass(frozen=True)
class ProductBoundReport:
    """Both sides of the triple-product lower bound on a breakpoint window."""

    triple_sum: float
    span_cubed: float

    @property
    def ratio(self) -> float:
        return self.triple_sum / self.span_cubed


def product_bound_check(mesh: TemporalMesh, m: int, n: int) -> ProductBoundReport:
    """Compare sum_{m<l1<l2<l3<=n} tau_l1 tau_l2 tau_l3 with (t_n - t_m)^3.

    Indices refer to breakpoints (0-based, as in the mesh), so the window
    covers intervals m+1 .. n in 1-based interval counting; at least three
    intervals are required.
    """
    if not 0 <= m < n <= mesh.n_intervals:
        raise ValueError("breakpoint window out of range")
    if n < m + 3:
        raise ValueError("window must contain at least three intervals")
    tau = mesh.tau_n[m:n]
    # elementary symmetric polynomial e3 via power sums
    s1 = tau.sum()
    s2 = (tau**2).sum()
    s3 = (tau**3).sum()
    e3 = (s1**3 - 3.0 * s1 * s2 + 2.0 * s3) / 6.0
    span = mesh.breakpoints[n] - mesh.breakpoints[m]
    return ProductBoundReport(float(e3), float(span**3))
