"""Experiment configuration and observed-order fitting.

Configs are flat ``key=value`` text merged over per-experiment defaults; the
documented keys are listed in ``DEFAULTS``.  Values stay strings until a
runner parses them, so unknown keys are cheap to carry around.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from dgtime.operators import parse_kv_text

EXPERIMENT_IDS = (
    "converge",
    "mr-sweep",
    "rational",
    "green",
    "heat",
    "initial",
    "one-step",
    "interp",
    "mollifier",
)

DEFAULTS: dict[str, dict[str, str]] = {
    "converge": {
        "r": "1",
        "p": "2,4",
        "N": "8,16,32,64,128",
        "T": "1.0",
        "eigenvalues": "1,4,9",
        "seed": "1234",
        "order_tol": "0.15",
    },
    "mr-sweep": {
        "r": "1",
        "p": "2,4",
        "N": "8,16,32,64,128,256,512",
        "T": "1.0",
        "c": "0.5",
        "spectrum": "log:1:1e4:20",
        "ensemble": "32",
        "seed": "1234",
        "drift_limit": "1.25",
    },
    "rational": {
        "r": "0,1,2,3,4",
        "delta": "1.0471975511965976",  # pi/3
        "contour_samples": "241",
        "seed": "1234",
    },
    "green": {
        "r": "1",
        "p": "2",
        "alpha": "",  # empty: use 1/p' + 1/2
        "N": "8,16,32,64,128",
        "T": "1.0",
        # the rate is driven by modes the mesh cannot resolve, so the
        # spectrum must extend well past 1/tau at the finest level
        "spectrum": "log:1:1e6:40",
        "seed": "1234",
        "order_tol": "0.2",
        "locality_tol": "0.3",
    },
    "heat": {
        "r": "1",
        "p": "2",
        "q": "2",
        "T": "1.0",
        "tau_sweep_cells": "256",
        "tau_sweep_N": "4,8,16,32,64",
        "h_sweep_N": "256",
        "h_sweep_cells": "8,16,32,64,128",
        "mr_levels": "8,16,32,64",
        "seed": "1234",
        "order_tol": "0.15",
        "drift_limit": "1.25",
    },
    "initial": {
        "r": "1",
        "p": "2",
        "theta": "0.5,1.0",
        "N": "8,16,32,64,128",
        "T": "1.0",
        "spectrum": "log:1:1e4:20",
        "members": "8",
        "seed": "1234",
        "drift_limit": "1.25",
    },
    "one-step": {
        "r": "1",
        "p": "2,4",
        "N": "8,16,32,64,128",
        "T": "1.0",
        "spectrum": "log:1:1e3:12",
        "members": "8",
        "seed": "1234",
        "drift_limit": "1.25",
    },
    "interp": {
        "r": "1",
        "p": "2",
        "N": "8,16,32,64,128",
        "T": "1.0",
        "seed": "1234",
        "order_tol": "0.15",
    },
    "mollifier": {
        "r": "1",
        "N": "8,16,32,64,128",
        "T": "1.0",
        "seed": "1234",
        "exponent_tol": "0.1",
    },
}


@dataclass
class ExperimentConfig:
    """An experiment id plus its merged key-value options."""

    experiment: str
    options: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        merged = dict(DEFAULTS[self.experiment])
        merged.update(self.options)
        self.options = merged
        if "N" in self.options:
            ns = self.int_list("N")
            if any(b <= a for a, b in zip(ns, ns[1:])):
                raise ValueError("refinement list N must be strictly increasing")
        r_values = self.int_list("r") if "r" in self.options else []
        for r in r_values:
            if not 0 <= r <= 4:
                raise ValueError("degree r must lie in 0..4")
        if self.experiment in ("mr-sweep", "green") and any(r < 1 for r in r_values):
            raise ValueError(f"{self.experiment} requires degree r >= 1")

    # typed accessors ------------------------------------------------------

    def get(self, key: str) -> str:
        return self.options[key]

    def int(self, key: str) -> int:
        return int(self.options[key])

    def float(self, key: str) -> float:
        return float(self.options[key])

    def int_list(self, key: str) -> list[int]:
        return [int(s) for s in self.options[key].split(",") if s.strip()]

    def float_list(self, key: str) -> list[float]:
        return [float(s) for s in self.options[key].split(",") if s.strip()]

    @property
    def seed(self) -> int:
        return int(self.options.get("seed", "0"))


def load_config(
    experiment: str,
    path: str | Path | None = None,
    overrides: dict[str, str] | None = None,
) -> ExperimentConfig:
    options: dict[str, str] = {}
    if path is not None:
        options.update(parse_kv_text(Path(path).read_text()))
    options.pop("experiment", None)
    if overrides:
        options.update(overrides)
    return ExperimentConfig(experiment, options)


@dataclass(frozen=True)
class OrderFit:
    """Least-squares slope of log(value) against log(step size)."""

    steps: np.ndarray
    values: np.ndarray
    slope: float
    intercept: float
    residual: float   # RMS deviation in log space

    @property
    def confirmed(self) -> bool:
        return bool(self.residual < 0.05)


def fit_order(steps, values) -> OrderFit:
    steps = np.asarray(steps, dtype=float)
    values = np.asarray(values, dtype=float)
    if steps.size < 3:
        raise ValueError("order fits need at least three refinement levels")
    if np.any(values <= 0.0) or np.any(steps <= 0.0):
        raise ValueError("order fits need positive step sizes and values")
    ls, lv = np.log(steps), np.log(values)
    slope, intercept = np.polyfit(ls, lv, 1)
    fitted = slope * ls + intercept
    residual = float(np.sqrt(np.mean((lv - fitted) ** 2)))
    return OrderFit(steps, values, float(slope), float(intercept), residual)
