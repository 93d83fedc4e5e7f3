"""Experiment drivers: convergence, stability, and scaling studies with CSV output."""

from dgtime.experiments.config import (
    DEFAULTS,
    EXPERIMENT_IDS,
    ExperimentConfig,
    OrderFit,
    fit_order,
    load_config,
)
from dgtime.experiments.runners import (
    ExperimentResult,
    run_converge,
    run_experiment,
    run_green,
    run_heat,
    run_initial,
    run_interp,
    run_mollifier,
    run_mr_sweep,
    run_one_step,
    run_rational,
)

__all__ = [
    "DEFAULTS",
    "EXPERIMENT_IDS",
    "ExperimentConfig",
    "OrderFit",
    "fit_order",
    "load_config",
    "ExperimentResult",
    "run_converge",
    "run_experiment",
    "run_green",
    "run_heat",
    "run_initial",
    "run_interp",
    "run_mollifier",
    "run_mr_sweep",
    "run_one_step",
    "run_rational",
]
