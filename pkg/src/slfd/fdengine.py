"""Rank-m correction series on top of a basic eigenpair.

Each rank d produces an eigenvalue correction

    lambda^(d) = nu_n * integral (q - qbar) u^(d-1) u^(0),   nu_n = 1/norm_sq,

a right-hand side

    F^(d) = -sum_{k=0}^{d-1} lambda^(d-k) u^(k) + (q - qbar) u^(d-1),

and an eigenfunction correction through the Cauchy kernel
K(x, xi) = w(x) u0(xi) - w(xi) u0(x) evaluated with Stenger indefinite
integration (running carries across intervals), followed by re-projection
against u^(0).  Derivative samples of the corrections come from the kernel
identity u' = w' I1 - u0' I2, never from numerical differentiation.

A-priori bounds use the majorant coefficients alpha_j = 2(2j-1)!!/(2j+2)!!
(alpha_j * 4^j are the Catalan numbers); a-posteriori accuracy is measured by
the residual functionals eta (integrated first-order form) and eta_bar
(second-order form).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .basicsolver import BasicEigenpair, sample_function
from .coeffmesh import PiecewiseConstantCoeff
from .errors import DimensionMismatch, InvalidParameter, NonFiniteValue, EvaluationError, StagnationWarning
from .sincquad import (
    SincGrid,
    indefinite_integrate_all,
    inner_product,
    integrate,
    norm_l2,
)

GridFunction = np.ndarray


def sample_potential(q, grid: SincGrid) -> GridFunction:
    """q sampled at every grid node; singular abscissae must be mesh points,
    so all nodes (clamped one ulp inside each interval) evaluate finite."""
    n, m = grid.shape
    out = np.empty((n, m))
    for i in range(n):
        row = grid.z[i]
        for j in range(m):
            try:
                out[i, j] = q(float(row[j]))
            except NonFiniteValue as exc:
                raise EvaluationError(
                    f"potential non-finite at grid node x = {row[j]!r}; "
                    "declare the singular point as a breakpoint"
                ) from exc
    return out


def compute_lambda_correction(
    d: int,
    u_prev: GridFunction,
    u0: GridFunction,
    qdiff: GridFunction,
    grid: SincGrid,
    norm_sq: float,
) -> float:
    """Rank-d eigenvalue correction from the previous eigenfunction term."""
    if d < 1:
        raise InvalidParameter("correction rank must be >= 1")
    u_prev = grid.check_samples(u_prev)
    u0 = grid.check_samples(u0)
    qdiff = grid.check_samples(qdiff)
    return integrate(grid, u0 * u_prev * qdiff) / norm_sq


def compute_rhs(
    d: int,
    lambdas: np.ndarray,
    u_all: list[GridFunction],
    qdiff: GridFunction,
) -> GridFunction:
    """Right-hand side F^(d) from lambda^(1..d) and u^(0..d-1) samples."""
    if d < 1:
        raise InvalidParameter("rank must be >= 1")
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape != (d,) or len(u_all) < d:
        raise DimensionMismatch("need lambda^(1..d) and u^(0..d-1)")
    out = qdiff * u_all[d - 1]
    for k in range(d):
        out = out - lambdas[d - 1 - k] * u_all[k]  # lambdas[j-1] holds lambda^(j)
    return out


def _correction_with_derivative(F, u0, w, u0_deriv, w_deriv, grid):
    i1 = indefinite_integrate_all(grid, u0 * F)
    i2 = indefinite_integrate_all(grid, w * F)
    values = w * i1 - u0 * i2
    derivs = w_deriv * i1 - u0_deriv * i2
    return values, derivs


def compute_eigfun_correction(
    F: GridFunction, u0: GridFunction, w: GridFunction, grid: SincGrid
) -> GridFunction:
    """Eigenfunction correction u(z) = w(z) I1(z) - u0(z) I2(z) with
    I1 = int u0*F and I2 = int w*F accumulated across intervals."""
    F = grid.check_samples(F)
    u0 = grid.check_samples(u0)
    w = grid.check_samples(w)
    i1 = indefinite_integrate_all(grid, u0 * F)
    i2 = indefinite_integrate_all(grid, w * F)
    return w * i1 - u0 * i2


def orthogonalize(
    u: GridFunction, u0: GridFunction, grid: SincGrid, norm_sq: float
) -> GridFunction:
    """Projection of u onto the orthogonal complement of u0."""
    u = grid.check_samples(u)
    u0 = grid.check_samples(u0)
    coeff = inner_product(grid, u, u0) / norm_sq
    return u - coeff * u0


# ---------------------------------------------------------------------------
# majorant coefficients and a-priori bounds


@lru_cache(maxsize=None)
def alpha_fraction(j: int) -> Fraction:
    """alpha_j = 2 (2j-1)!! / (2j+2)!! as an exact rational ((-1)!! = 1)."""
    if j < 0:
        raise InvalidParameter("alpha index must be >= 0")
    odd = 1
    for m in range(1, 2 * j, 2):
        odd *= m
    even = 1
    for m in range(2, 2 * j + 3, 2):
        even *= m
    return Fraction(2 * odd, even)


def alpha(j: int) -> float:
    return float(alpha_fraction(j))


@lru_cache(maxsize=None)
def catalan(j: int) -> int:
    """Catalan number C_j = binom(2j, j)/(j + 1)."""
    return math.comb(2 * j, j) // (j + 1)


def majorant_sequence(count: int) -> list[Fraction]:
    """V_j from V_j = sum_{s<j} V_{j-1-s} V_s, V_0 = 1, in exact arithmetic."""
    v = [Fraction(1)]
    for j in range(1, count):
        v.append(sum(v[j - 1 - s] * v[s] for s in range(j)))
    return v


def _tail_sum_bound(m: int) -> float:
    """Upper bound of sum_{j>=m} 1/((j+1) sqrt(pi j))."""
    return 2.0 / math.sqrt(math.pi) * math.atan(1.0 / math.sqrt(m + 1.0))


@dataclass(frozen=True)
class ConvergenceBound:
    """A-priori convergence data: r_bar = M_n * sup|q - qbar|, r = 4*r_bar.

    status is "convergent" (r < 1), "critical" (r == 1) or "divergent"
    (r > 1, bounds not applicable)."""

    r_bar: float
    dev: float

    @property
    def r(self) -> float:
        return 4.0 * self.r_bar

    @property
    def status(self) -> str:
        if self.r < 1.0:
            return "convergent"
        if self.r == 1.0:
            return "critical"
        return "divergent"

    @property
    def applicable(self) -> bool:
        return self.r <= 1.0

    def eig_bound(self, m: int) -> float:
        """Bound on |lambda - partial sum through rank m|."""
        if self.r < 1.0:
            return self.dev * self.r**m * alpha(m) / (1.0 - self.r)
        if self.r == 1.0:
            return self.dev * _tail_sum_bound(m)
        return math.nan

    def fun_bound(self, m: int) -> float:
        """Bound on the L2 error of the rank-m eigenfunction sum."""
        if self.r < 1.0:
            return self.r ** (m + 1) * alpha(m + 1) / (1.0 - self.r)
        if self.r == 1.0:
            return _tail_sum_bound(m + 1)
        return math.nan


def apriori_bounds(M_n: float, dev: float) -> ConvergenceBound:
    """A-priori bound evaluators from the gap quantity and sup|q - qbar|."""
    if not math.isfinite(dev):
        raise InvalidParameter("deviation must be finite (bounded potentials only)")
    return ConvergenceBound(r_bar=M_n * dev, dev=dev)


# ---------------------------------------------------------------------------
# the rank loop


@dataclass
class FdSolution:
    """Accumulated corrections for one eigenvalue index.

    correction_norms are raw tanh-rule L2 norms (index 0 equals
    sqrt(norm_sq)); norms_normalized rescale by 1/sqrt(norm_sq) and are the
    quantities whose logarithm the convergence figures plot.
    """

    index: int
    rank: int
    lambda_corrections: np.ndarray  # lambda^(0..m)
    correction_norms: np.ndarray
    norms_normalized: np.ndarray
    eigenfunction_samples: GridFunction
    derivative_samples: GridFunction
    rhs_sum: GridFunction  # sum of F^(1..m) samples
    norm_sq: float
    eta: np.ndarray       # per-rank residual of the partial sums
    eta_bar: np.ndarray
    stagnated: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def eigenvalue_sum(self) -> float:
        return float(np.sum(self.lambda_corrections))

    @property
    def lambda_partial(self) -> np.ndarray:
        return np.cumsum(self.lambda_corrections)


def _eta_from_arrays(grid, q_samples, lam_sum, usum, usum_deriv, norm_sq):
    inner = indefinite_integrate_all(grid, (lam_sum - q_samples) * usum)
    resid = grid.one_minus_sq * usum_deriv + inner
    return norm_l2(grid, resid) / math.sqrt(norm_sq)


def _eta_bar_from_arrays(grid, q_samples, qbar_samples, lam0, lam_sum, usum, f_sum, norm_sq):
    resid = (qbar_samples - lam0) * usum + f_sum + (lam_sum - q_samples) * usum
    return norm_l2(grid, resid) / math.sqrt(norm_sq)


def run_fd(
    pair: BasicEigenpair,
    qbar: PiecewiseConstantCoeff,
    grid: SincGrid,
    q,
    rank: int | None = None,
    tol: float | None = None,
    q_samples: GridFunction | None = None,
) -> FdSolution:
    """Correction loop: ComputeLambda, ComputeF, eigenfunction correction,
    orthogonality re-projection, repeated up to `rank` or until
    max(|lambda^(d)|, ||u^(d)||) < tol.

    Warns (StagnationWarning) when correction norms grow three ranks in a
    row, which signals a too-coarse coefficient approximation.
    """
    if rank is None and tol is None:
        raise InvalidParameter("specify a rank cap, a tolerance, or both")
    max_rank = 200 if rank is None else int(rank)
    if max_rank < 0:
        raise InvalidParameter("rank must be >= 0")

    u0, u0d = sample_function(pair.eigenfunction, grid)
    w, wd = sample_function(pair.second, grid)
    if q_samples is None:
        q_samples = sample_potential(q, grid)
    else:
        q_samples = grid.check_samples(q_samples)
    qbar_samples = np.broadcast_to(
        np.asarray(qbar.values)[:, None], grid.shape
    )
    qdiff = q_samples - qbar_samples
    norm_sq = pair.norm_sq
    scale = math.sqrt(norm_sq)

    lambdas = [pair.lambda0]
    u_stack = [u0]
    deriv_sum = u0d.copy()
    usum = u0.copy()
    f_sum = np.zeros_like(u0)
    norms = [norm_l2(grid, u0)]
    etas = [_eta_from_arrays(grid, q_samples, pair.lambda0, usum, deriv_sum, norm_sq)]
    eta_bars = [
        _eta_bar_from_arrays(
            grid, q_samples, qbar_samples, pair.lambda0, pair.lambda0, usum, f_sum, norm_sq
        )
    ]

    grow_streak = 0
    stagnated = False
    for d in range(1, max_rank + 1):
        lam_d = compute_lambda_correction(d, u_stack[d - 1], u0, qdiff, grid, norm_sq)
        lambdas.append(lam_d)
        f_d = compute_rhs(d, np.asarray(lambdas[1:]), u_stack, qdiff)
        u_d, u_d_deriv = _correction_with_derivative(f_d, u0, w, u0d, wd, grid)
        proj = inner_product(grid, u_d, u0) / norm_sq
        u_d = u_d - proj * u0
        u_d_deriv = u_d_deriv - proj * u0d

        u_stack.append(u_d)
        usum = usum + u_d
        deriv_sum = deriv_sum + u_d_deriv
        f_sum = f_sum + f_d
        norms.append(norm_l2(grid, u_d))
        lam_sum = float(np.sum(lambdas))
        etas.append(_eta_from_arrays(grid, q_samples, lam_sum, usum, deriv_sum, norm_sq))
        eta_bars.append(
            _eta_bar_from_arrays(
                grid, q_samples, qbar_samples, pair.lambda0, lam_sum, usum, f_sum, norm_sq
            )
        )

        if len(norms) >= 2 and norms[-1] > norms[-2]:
            grow_streak += 1
            if grow_streak >= 3 and not stagnated:
                stagnated = True
                warnings.warn(
                    StagnationWarning(
                        f"correction norms grew for 3 consecutive ranks at n={pair.index}; "
                        "the series may diverge (refine the mesh)"
                    )
                )
        else:
            grow_streak = 0

        if tol is not None and max(abs(lam_d), norms[-1] / scale) < tol:
            break

    norms_arr = np.asarray(norms)
    # grid-sampled stand-in for sup|q - qbar| feeding the a-priori bounds
    dev_grid = float(np.max(np.abs(qdiff)))
    bound = ConvergenceBound(r_bar=pair.gap_M * dev_grid, dev=dev_grid)
    ranks = np.arange(len(lambdas))
    return FdSolution(
        index=pair.index,
        rank=len(lambdas) - 1,
        lambda_corrections=np.asarray(lambdas),
        correction_norms=norms_arr,
        norms_normalized=norms_arr / scale,
        eigenfunction_samples=usum,
        derivative_samples=deriv_sum,
        rhs_sum=f_sum,
        norm_sq=norm_sq,
        eta=np.asarray(etas),
        eta_bar=np.asarray(eta_bars),
        stagnated=stagnated,
        diagnostics={
            "abs_lambda": np.abs(np.asarray(lambdas)),
            "quadrature_step": grid.h,
            "r_bar": bound.r_bar,
            "eig_bound": np.asarray([bound.eig_bound(int(m)) for m in ranks]),
            "fun_bound": np.asarray([bound.fun_bound(int(m)) for m in ranks]),
        },
    )


def residual_eta(sol: FdSolution, q, grid: SincGrid, q_samples=None) -> float:
    """Integrated first-order residual of the normalized rank-m sum against q:
    the L2 norm of (1 - x^2) u' + int_{-1}^{x} (lambda - q) u."""
    if q_samples is None:
        q_samples = sample_potential(q, grid)
    return _eta_from_arrays(
        grid,
        q_samples,
        sol.eigenvalue_sum,
        sol.eigenfunction_samples,
        sol.derivative_samples,
        sol.norm_sq,
    )


def residual_eta_bar(
    sol: FdSolution, q, grid: SincGrid, qbar: PiecewiseConstantCoeff, q_samples=None
) -> float:
    """Second-order residual against q, with the outer derivative of each term
    replaced through the kernel identity it satisfies exactly."""
    if q_samples is None:
        q_samples = sample_potential(q, grid)
    qbar_samples = np.broadcast_to(np.asarray(qbar.values)[:, None], grid.shape)
    lam0 = float(sol.lambda_corrections[0])
    return _eta_bar_from_arrays(
        grid,
        q_samples,
        qbar_samples,
        lam0,
        sol.eigenvalue_sum,
        sol.eigenfunction_samples,
        sol.rhs_sum,
        sol.norm_sq,
    )
