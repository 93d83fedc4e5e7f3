"""Discontinuous Galerkin time stepping for abstract parabolic problems.

The package solves u' + A u = f with discontinuous piecewise polynomials in
time, analyzes the rational transfer functions of the one-step map, and ships
experiment drivers that measure stability constants and convergence orders.
"""

from dgtime.temporal_mesh import (
    TemporalMesh,
    make_uniform,
    make_quasi_uniform,
    product_bound_check,
)
from dgtime.polybasis import ReferenceElement, build_reference, eval_basis
from dgtime.operators import (
    OperatorSpec,
    StateVector,
    make_diagonal,
    make_dense,
    make_fem1d,
    apply,
    adjoint,
    resolvent_solve,
    semigroup_apply,
    interpolation_norm,
)

__version__ = "0.1.0"

__all__ = [
    "TemporalMesh",
    "make_uniform",
    "make_quasi_uniform",
    "product_bound_check",
    "ReferenceElement",
    "build_reference",
    "eval_basis",
    "OperatorSpec",
    "StateVector",
    "make_diagonal",
    "make_dense",
    "make_fem1d",
    "apply",
    "adjoint",
    "resolvent_solve",
    "semigroup_apply",
    "interpolation_norm",
    "__version__",
]
