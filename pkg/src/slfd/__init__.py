"""Eigensolver for the singular Sturm-Liouville problem with the Legendre
differential operator and a piecewise-continuous potential, built on a
piecewise-constant basic problem plus a rank-m correction series evaluated
with sinc quadratures."""

__version__ = "0.1.0"

from . import errors
from .coeffmesh import (
    Mesh,
    PiecewiseConstantCoeff,
    Potential,
    approximate_coefficient,
    build_mesh,
    sup_deviation,
)
from .basicsolver import (
    BasicEigenpair,
    PiecewiseLegendreFunction,
    bracket_eigenvalues,
    characteristic,
    evaluate,
    solve_basic,
    transfer_coefficients,
)
from .fdengine import (
    ConvergenceBound,
    FdSolution,
    apriori_bounds,
    compute_eigfun_correction,
    compute_lambda_correction,
    compute_rhs,
    orthogonalize,
    residual_eta,
    residual_eta_bar,
    run_fd,
)
from .oracle import galerkin_oracle, jacobi_eigenvalues
from .sincquad import SincGrid, build_grid, indefinite_integrate, integrate
from .specfun import (
    Degree,
    FunctionValuePair,
    degree_from_lambda,
    endpoint_limits,
    legendre_pair,
    legendre_polynomial,
    sine_integral,
    stenger_delta,
)

__all__ = [
    "BasicEigenpair",
    "ConvergenceBound",
    "Degree",
    "FdSolution",
    "FunctionValuePair",
    "Mesh",
    "PiecewiseConstantCoeff",
    "PiecewiseLegendreFunction",
    "Potential",
    "SincGrid",
    "approximate_coefficient",
    "apriori_bounds",
    "bracket_eigenvalues",
    "build_grid",
    "build_mesh",
    "characteristic",
    "compute_eigfun_correction",
    "compute_lambda_correction",
    "compute_rhs",
    "degree_from_lambda",
    "endpoint_limits",
    "errors",
    "evaluate",
    "galerkin_oracle",
    "indefinite_integrate",
    "integrate",
    "jacobi_eigenvalues",
    "legendre_pair",
    "legendre_polynomial",
    "orthogonalize",
    "residual_eta",
    "residual_eta_bar",
    "run_fd",
    "sine_integral",
    "solve_basic",
    "stenger_delta",
    "sup_deviation",
    "transfer_coefficients",
]
