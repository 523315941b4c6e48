"""Solver for the piecewise-constant basic eigenproblem.

On each mesh interval the solution is A_i * P_nu_i(x) + B_i * Q_nu_i(x) with
nu_i(lambda) solving nu*(nu+1) = lambda - qbar_i.  Coefficients propagate
from the last interval backwards through value/derivative matching at the
interior nodes; the boundary combination at x = -1,

    Phi(lambda) = A_1 * 2*sin(pi*nu_1)/pi + B_1 * cos(pi*nu_1),

vanishes exactly at the basic eigenvalues, which are located by a scan plus
bisection.  (A_N, B_N) = (1, 0) yields the eigenfunction branch, (0, 1) the
second solution used in the correction kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .coeffmesh import PiecewiseConstantCoeff
from .errors import (
    BracketFailure,
    DomainError,
    InvalidParameter,
    NormDegenerate,
    SingularTransfer,
)
from .sincquad import SincGrid, integrate

_IMAG_TOL = 1e-8


@dataclass(frozen=True)
class PiecewiseLegendreFunction:
    """A basic-problem solution stored as per-interval (nu_i, A_i, B_i)."""

    mesh: object
    nus: tuple[complex, ...]
    a: tuple[complex, ...]
    b: tuple[complex, ...]
    kind: str  # "eigenfunction" | "second_solution"

    def value(self, x: float) -> float:
        return evaluate(self, x)

    def derivative(self, x: float) -> float:
        return evaluate(self, x, derivative=True)


@dataclass(frozen=True)
class BasicEigenpair:
    """Eigensolution of the basic problem plus the data the correction series
    needs: L2 norm square of the eigenfunction, the second solution, and the
    reciprocal spectral gap M_n."""

    index: int
    lambda0: float
    eigenfunction: PiecewiseLegendreFunction
    norm_sq: float
    second: PiecewiseLegendreFunction
    gap_M: float


def _degrees(lam: float, qbar: PiecewiseConstantCoeff) -> list[complex]:
    return [specfun.degree_from_lambda(lam, qi).value for qi in qbar.values]


def transfer_coefficients(
    lam: float,
    qbar: PiecewiseConstantCoeff,
    A_N: complex,
    B_N: complex,
    return_deltas: bool = False,
):
    """Backward recurrence for the per-interval coefficients.

    Returns [(A_N, B_N), (A_{N-1}, B_{N-1}), ..., (A_1, B_1)]; with
    return_deltas=True also the Wronskian denominators delta_{i-1} used at
    each interior node (analytically 1/(1 - x_{i-1}^2)).
    """
    nus = _degrees(lam, qbar)
    pts = qbar.mesh.points
    n = qbar.mesh.n_intervals
    coeffs = [(complex(A_N), complex(B_N))]
    deltas = []
    a_cur, b_cur = complex(A_N), complex(B_N)
    for i in range(n - 1, 0, -1):  # node x_i joins intervals i-1 and i (0-based)
        x_node = pts[i]
        cur = specfun.legendre_pair(nus[i], x_node)
        prev = specfun.legendre_pair(nus[i - 1], x_node)
        c = a_cur * cur.p + b_cur * cur.q
        d = a_cur * cur.p_prime + b_cur * cur.q_prime
        delta = prev.p * prev.q_prime - prev.p_prime * prev.q
        if abs(delta) < 1e-300:
            raise SingularTransfer(f"Wronskian collapsed at node x = {x_node}")
        a_cur = (c * prev.q_prime - d * prev.q) / delta
        b_cur = (d * prev.p - c * prev.p_prime) / delta
        coeffs.append((a_cur, b_cur))
        deltas.append(delta)
    if return_deltas:
        return coeffs, deltas
    return coeffs


def characteristic(lam: float, qbar: PiecewiseConstantCoeff) -> float:
    """Boundary-condition residual at x = -1 after back-propagating (1, 0)."""
    coeffs = transfer_coefficients(lam, qbar, 1.0, 0.0)
    a1, b1 = coeffs[-1]
    nu1 = specfun.degree_from_lambda(lam, qbar.values[0]).value
    term_a = a1 * (2.0 / math.pi) * specfun._sinpi_c(nu1)
    term_b = b1 * specfun._cospi_c(nu1)
    phi = term_a + term_b
    scale = max(abs(term_a) + abs(term_b), 1e-30)
    assert abs(phi.imag) <= _IMAG_TOL * max(scale, 1.0), (
        f"characteristic picked up an imaginary part: {phi} at lambda={lam}"
    )
    return phi.real


def _scan_step(lam: float, qbar: PiecewiseConstantCoeff, scale: float) -> float:
    shifted = max(lam - qbar.mean_value, 0.0)
    n_est = 0.5 * (math.sqrt(1.0 + 4.0 * shifted) - 1.0)
    step = min(1.0, max(0.25, 2.0 * n_est - 2.0 * qbar.max_abs))
    return scale * step


def bracket_eigenvalues(
    qbar: PiecewiseConstantCoeff, n_max: int, step_scale: float = 1.0
) -> list[tuple[float, float]]:
    """Sign-change brackets of Phi around the first n_max + 1 eigenvalues.

    Scans upward from just below min(qbar) with a gap-informed step; raises
    BracketFailure when too few sign changes appear below the spectral cap
    (callers may retry with a smaller step_scale).
    """
    if n_max < 0:
        raise InvalidParameter("n_max must be >= 0")
    cap = (n_max + 2.0) * (n_max + 3.0) + qbar.max_abs
    lam = qbar.min_value - 0.5
    phi_lo = characteristic(lam, qbar)
    if phi_lo == 0.0:
        lam -= 1e-6
        phi_lo = characteristic(lam, qbar)
    brackets: list[tuple[float, float]] = []
    while lam < cap and len(brackets) < n_max + 1:
        nxt = lam + _scan_step(lam, qbar, step_scale)
        phi_hi = characteristic(nxt, qbar)
        if phi_hi == 0.0:
            nxt += 1e-9 * max(1.0, abs(nxt))
            phi_hi = characteristic(nxt, qbar)
        if phi_lo * phi_hi < 0.0:
            brackets.append((lam, nxt))
        lam, phi_lo = nxt, phi_hi
    if len(brackets) < n_max + 1:
        raise BracketFailure(len(brackets), n_max + 1, cap)
    return brackets


@lru_cache(maxsize=64)
def _bracket_with_retry(qbar: PiecewiseConstantCoeff, n_max: int) -> tuple[tuple[float, float], ...]:
    last: BracketFailure | None = None
    for scale in (1.0, 0.5, 0.25, 0.125, 0.0625):
        try:
            return tuple(bracket_eigenvalues(qbar, n_max, step_scale=scale))
        except BracketFailure as exc:
            last = exc
    raise last


@lru_cache(maxsize=1024)
def _eigenvalue(qbar: PiecewiseConstantCoeff, n: int, tol: float) -> float:
    brackets = _bracket_with_retry(qbar, n)
    return _bisect(qbar, *brackets[n], tol=tol)


def _bisect(qbar: PiecewiseConstantCoeff, lo: float, hi: float, tol: float) -> float:
    phi_lo = characteristic(lo, qbar)
    for _ in range(240):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        phi_mid = characteristic(mid, qbar)
        if phi_mid == 0.0:
            return mid
        if phi_lo * phi_mid < 0.0:
            hi = mid
        else:
            lo, phi_lo = mid, phi_mid
    return 0.5 * (lo + hi)


def _assemble(lam: float, qbar: PiecewiseConstantCoeff, A_N, B_N, kind: str) -> PiecewiseLegendreFunction:
    coeffs = transfer_coefficients(lam, qbar, A_N, B_N)
    coeffs = coeffs[::-1]  # now interval order 1..N
    nus = tuple(_degrees(lam, qbar))
    return PiecewiseLegendreFunction(
        mesh=qbar.mesh,
        nus=nus,
        a=tuple(c[0] for c in coeffs),
        b=tuple(c[1] for c in coeffs),
        kind=kind,
    )


def sample_function(fn: PiecewiseLegendreFunction, grid: SincGrid) -> tuple[np.ndarray, np.ndarray]:
    """Values and x-derivatives of fn at all grid nodes, as real arrays.

    Eigenfunctions must be real up to round-off.  A second solution touching
    a conical interval carries a structural imaginary part that is exactly a
    multiple of the eigenfunction; dropping it is a kernel-equivalent choice
    of second solution (K is invariant under w -> w + c*u0) and preserves the
    Wronskian against u0, so the real part is returned without complaint.
    """
    if grid.mesh is not fn.mesh and tuple(grid.mesh.points) != tuple(fn.mesh.points):
        raise InvalidParameter("grid and function are built on different meshes")
    n, m = grid.shape
    vals = np.empty((n, m))
    ders = np.empty((n, m))
    for i in range(n):
        p, dp, q, dq = specfun._pair_at(
            complex(fn.nus[i]), grid.t_upper[i], grid.t_lower[i]
        )
        v = fn.a[i] * p + fn.b[i] * q
        d = fn.a[i] * dp + fn.b[i] * dq
        if fn.kind == "eigenfunction":
            scale = float(np.max(np.abs(v))) + 1e-300
            if float(np.max(np.abs(v.imag))) > 1e-9 * max(scale, 1.0):
                raise SingularTransfer(
                    f"sampled {fn.kind} has a large imaginary part on interval {i}"
                )
        vals[i] = v.real
        ders[i] = d.real
    return vals, ders


def solve_basic(
    n: int, qbar: PiecewiseConstantCoeff, grid: SincGrid, tol: float = 1e-13
) -> BasicEigenpair:
    """Eigenpair number n of the basic problem, with norm, second solution and
    the reciprocal spectral gap from the neighbouring eigenvalues."""
    if tol < 1e-14:
        raise InvalidParameter("bisection tolerance must be >= 1e-14")
    lam_n = _eigenvalue(qbar, n, tol)
    lam_up = _eigenvalue(qbar, n + 1, tol)
    gaps = [lam_up - lam_n]
    if n >= 1:
        gaps.append(lam_n - _eigenvalue(qbar, n - 1, tol))
    gap_m = max(1.0 / g for g in gaps)

    eigfun = _assemble(lam_n, qbar, 1.0, 0.0, "eigenfunction")
    second = _assemble(lam_n, qbar, 0.0, 1.0, "second_solution")
    vals, _ = sample_function(eigfun, grid)
    norm_sq = integrate(grid, vals * vals)
    if norm_sq < 1e-12:
        raise NormDegenerate(f"eigenfunction norm^2 = {norm_sq:g}")
    return BasicEigenpair(
        index=n,
        lambda0=lam_n,
        eigenfunction=eigfun,
        norm_sq=norm_sq,
        second=second,
        gap_M=gap_m,
    )


def evaluate(fn: PiecewiseLegendreFunction, x: float, derivative: bool = False) -> float:
    """Value (or x-derivative) of a piecewise solution at x in (-1, 1)."""
    if not abs(x) < 1.0:
        raise DomainError(f"x = {x!r} is outside (-1, 1)")
    i = fn.mesh.interval_of(x)
    pair = specfun.legendre_pair(fn.nus[i], x)
    if derivative:
        val = fn.a[i] * pair.p_prime + fn.b[i] * pair.q_prime
    else:
        val = fn.a[i] * pair.p + fn.b[i] * pair.q
    return val.real
