"""Legendre functions of the first and second kind of arbitrary degree on (-1, 1).

Evaluation strategy:

* P_nu on [0, 1) is the Gauss hypergeometric series in t = (1 - x)/2 <= 1/2.
* Q_nu on [0, 1) is a logarithmic series in the same variable whose
  coefficients are built by fused recurrences (products g_k * psi(...) are
  carried as single quantities), so the same code path is valid for generic,
  near-integer and exactly integer degrees, and for conical degrees
  nu = -1/2 + i*tau.
* Values for x < 0 come from the degree-preserving reflection formulas.
* Degrees with Re(nu) >= 3/2 are reduced to a base degree in [-1/2, 3/2)
  and raised by the three-term recurrence, which is stable on (-1, 1).

Derivatives are term-wise derivatives of the same series, which preserves the
Wronskian P*Q' - P'*Q = 1/(1 - x^2) to near machine accuracy.

The module also provides the sine-integral values Si(pi*k) needed for the
indefinite sinc-integration coefficient table delta_k = 1/2 + Si(pi*k)/pi.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NonConvergence

_EULER_GAMMA = 0.57721566490153286061
_SERIES_TOL = 1e-17
_SERIES_MAX_TERMS = 900


# ---------------------------------------------------------------------------
# degrees


@dataclass(frozen=True)
class Degree:
    """Legendre-function degree nu solving nu*(nu + 1) = lambda - qbar_i.

    Either nu is real, or Re(nu) = -1/2 exactly (conical case, produced when
    the discriminant 1 + 4*(lambda - qbar_i) is negative).
    """

    value: complex

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0.0


def degree_from_lambda(lam: float, qbar_i: float) -> Degree:
    """Degree nu = (-1 + sqrt(1 + 4*(lam - qbar_i)))/2, principal root."""
    disc = 1.0 + 4.0 * (lam - qbar_i)
    if disc >= 0.0:
        return Degree(complex(0.5 * (-1.0 + math.sqrt(disc)), 0.0))
    return Degree(complex(-0.5, 0.5 * math.sqrt(-disc)))


def _degree_value(nu) -> complex:
    if isinstance(nu, Degree):
        return nu.value
    return complex(nu)


# ---------------------------------------------------------------------------
# elementary helpers


def sinpi(v: float) -> float:
    """sin(pi*v) with argument reduction exact in floating point."""
    n = round(v)
    r = v - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def cospi(v: float) -> float:
    """cos(pi*v) with argument reduction exact in floating point."""
    n = round(v)
    r = v - n
    c = math.cos(math.pi * r)
    return -c if n % 2 else c


def _sinpi_c(v: complex) -> complex:
    if v.imag == 0.0:
        return complex(sinpi(v.real), 0.0)
    return cmath.sin(cmath.pi * v)


def _cospi_c(v: complex) -> complex:
    if v.imag == 0.0:
        return complex(cospi(v.real), 0.0)
    return cmath.cos(cmath.pi * v)


def digamma(z: complex) -> complex:
    """Digamma function for complex z away from the non-positive integers.

    Argument raised by the functional equation until Re(z) >= 10, then the
    asymptotic Bernoulli expansion; good to ~1e-15 there.
    """
    z = complex(z)
    shift = 0.0 + 0.0j
    while z.real < 10.0:
        if z == 0.0:
            raise ZeroDivisionError("digamma pole")
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    # Bernoulli numbers B_2..B_14 over 2n
    tail = inv2 * (
        1.0 / 12.0
        - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0
            - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0)))))
    )
    return shift + cmath.log(z) - 0.5 / z - tail


# ---------------------------------------------------------------------------
# base series (degree in the band Re nu in [-1/2, 3/2), or conical)


def _p_series(nu: complex, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_nu(x) and dP/dx for x = 1 - 2t, with t in (0, ~0.55]."""
    t = np.asarray(t, dtype=np.complex128)
    tmax = float(np.max(np.abs(t)))
    f = np.ones_like(t)
    df_dt = np.zeros_like(t)
    g = 1.0 + 0.0j
    tpow = np.ones_like(t)  # t^k before the k+1 update
    small = 0
    for k in range(_SERIES_MAX_TERMS):
        g = g * (k - nu) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0))
        kk = k + 1
        df_dt += (kk * g) * tpow
        tpow = tpow * t
        f += g * tpow
        bound = abs(g) * tmax**kk
        scale = max(1.0, float(np.max(np.abs(f))))
        if bound < _SERIES_TOL * scale:
            small += 1
            if small >= 2:
                return f, -0.5 * df_dt
        else:
            small = 0
        if g == 0.0:  # terminating (integer degree)
            return f, -0.5 * df_dt
    raise NonConvergence(f"P series stalled for nu={nu}, max t={tmax}")


def _q_series(nu: complex, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Q_nu(x) and dQ/dx for x = 1 - 2t, with t in (0, ~0.55].

    Series coefficients track g_k, g_k*psi(nu+1-k) and g_k*psi(nu+1+k) by
    fused recurrences, so near-pole digamma factors never meet vanishing g_k
    as a 0*inf product.
    """
    t = np.asarray(t, dtype=np.complex128)
    tmax = float(np.max(np.abs(t)))
    lnt = np.log(t)
    lmax = float(np.max(np.abs(lnt)))
    g = 1.0 + 0.0j
    b = digamma(nu + 1.0)  # g_k * psi(nu + 1 - k)
    c = b                  # g_k * psi(nu + 1 + k)
    hk = -_EULER_GAMMA     # psi(k + 1)
    coef = hk * g - 0.5 * (b + c)
    q = coef - 0.5 * g * lnt
    dq_dt = -0.5 * g / t
    tpow = np.ones_like(t)  # t^(k-1) for the next term index
    small = 0
    for k in range(_SERIES_MAX_TERMS):
        b = ((k - nu) * b + g) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0))
        c = (c * (k - nu) * (k + nu + 1.0) + g * (k - nu)) / ((k + 1.0) * (k + 1.0))
        g = g * (k - nu) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0))
        hk += 1.0 / (k + 1.0)
        kk = k + 1
        coef = hk * g - 0.5 * (b + c)
        dq_dt += (kk * coef - 0.5 * g - 0.5 * kk * g * lnt) * tpow
        tpow = tpow * t
        q += (coef - 0.5 * g * lnt) * tpow
        bound = (abs(coef) + abs(b) + abs(c) + abs(g) * (1.0 + lmax)) * tmax**kk
        scale = max(1.0, float(np.max(np.abs(q))))
        if bound < _SERIES_TOL * scale:
            small += 1
            if small >= 2:
                return q, -0.5 * dq_dt
        else:
            small = 0
    raise NonConvergence(f"Q series stalled for nu={nu}, max t={tmax}")


def _base_pair(nu: complex, tsmall: np.ndarray, negative: np.ndarray):
    """(P, P', Q, Q') of a base-band degree at points given by the smaller of
    the two endpoint parameters; `negative` marks points with x < 0."""
    p_pos, dp_pos = _p_series(nu, tsmall)
    q_pos, dq_pos = _q_series(nu, tsmall)
    if not negative.any():
        return p_pos, dp_pos, q_pos, dq_pos
    cs = _cospi_c(nu)
    sn = _sinpi_c(nu)
    p = np.where(negative, cs * p_pos - (2.0 / math.pi) * sn * q_pos, p_pos)
    dp = np.where(negative, -(cs * dp_pos - (2.0 / math.pi) * sn * dq_pos), dp_pos)
    q = np.where(negative, -cs * q_pos - (math.pi / 2.0) * sn * p_pos, q_pos)
    dq = np.where(negative, cs * dq_pos + (math.pi / 2.0) * sn * dp_pos, dq_pos)
    return p, dp, q, dq


def _pair_at(nu: complex, t_upper: np.ndarray, t_lower: np.ndarray):
    """(P, P', Q, Q') arrays of degree nu at points with endpoint parameters
    t_upper = (1-x)/2 and t_lower = (1+x)/2, each accurate in its own scale."""
    t_upper = np.asarray(t_upper, dtype=float)
    t_lower = np.asarray(t_lower, dtype=float)
    if np.any(t_upper <= 0.0) or np.any(t_lower <= 0.0):
        raise DomainError("argument outside the open interval (-1, 1)")
    if nu.imag != 0.0 and abs(nu.real + 0.5) > 1e-12:
        raise DomainError("complex degrees are supported only on Re(nu) = -1/2")
    if nu.imag == 0.0 and nu.real < -0.5:
        # mirror degree: P is invariant; Q is returned at the mirror degree
        nu = complex(-1.0 - nu.real, 0.0)

    negative = t_lower < t_upper
    tsmall = np.where(negative, t_lower, t_upper)

    steps = 0
    base = nu
    if nu.imag == 0.0 and nu.real >= 1.5:
        steps = int(math.floor(nu.real + 0.5))
        base = complex(nu.real - steps, 0.0)

    if steps == 0:
        return _base_pair(nu, tsmall, negative)

    x = np.where(negative, 2.0 * t_lower - 1.0, 1.0 - 2.0 * t_upper)
    p0, dp0, q0, dq0 = _base_pair(base, tsmall, negative)
    p1, dp1, q1, dq1 = _base_pair(base + 1.0, tsmall, negative)
    for s in range(steps - 1):
        d = base.real + 1.0 + s
        fac = 1.0 / (d + 1.0)
        p2 = fac * ((2.0 * d + 1.0) * x * p1 - d * p0)
        dp2 = fac * ((2.0 * d + 1.0) * (p1 + x * dp1) - d * dp0)
        q2 = fac * ((2.0 * d + 1.0) * x * q1 - d * q0)
        dq2 = fac * ((2.0 * d + 1.0) * (q1 + x * dq1) - d * dq0)
        p0, p1, dp0, dp1 = p1, p2, dp1, dp2
        q0, q1, dq0, dq1 = q1, q2, dq1, dq2
    return p1, dp1, q1, dq1


# ---------------------------------------------------------------------------
# scalar fast path (plain complex arithmetic; the array path carries numpy
# overhead that dominates single-point transfer-recurrence work)


def _p_series_s(nu: complex, t: float) -> tuple[complex, complex]:
    f = 1.0 + 0.0j
    df = 0.0 + 0.0j
    g = 1.0 + 0.0j
    tpow = 1.0 + 0.0j
    tm = abs(t)
    small = 0
    for k in range(_SERIES_MAX_TERMS):
        g = g * (k - nu) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0))
        df += (k + 1) * g * tpow
        tpow *= t
        f += g * tpow
        if g == 0.0:
            return f, -0.5 * df
        if abs(g) * tm ** (k + 1) < _SERIES_TOL * max(1.0, abs(f)):
            small += 1
            if small >= 2:
                return f, -0.5 * df
        else:
            small = 0
    raise NonConvergence(f"P series stalled for nu={nu}, t={t}")


def _q_series_s(nu: complex, t: float) -> tuple[complex, complex]:
    lnt = math.log(t)
    g = 1.0 + 0.0j
    b = digamma(nu + 1.0)
    c = b
    hk = -_EULER_GAMMA
    coef = hk * g - 0.5 * (b + c)
    q = coef - 0.5 * g * lnt
    dq = -0.5 * g / t
    tpow = 1.0 + 0.0j
    tm = abs(t)
    lm = abs(lnt)
    small = 0
    for k in range(_SERIES_MAX_TERMS):
        b = ((k - nu) * b + g) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0))
        c = (c * (k - nu) * (k + nu + 1.0) + g * (k - nu)) / ((k + 1.0) * (k + 1.0))
        g = g * (k - nu) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0))
        hk += 1.0 / (k + 1.0)
        kk = k + 1
        coef = hk * g - 0.5 * (b + c)
        dq += (kk * coef - 0.5 * g - 0.5 * kk * g * lnt) * tpow
        tpow *= t
        q += (coef - 0.5 * g * lnt) * tpow
        bound = (abs(coef) + abs(b) + abs(c) + abs(g) * (1.0 + lm)) * tm**kk
        if bound < _SERIES_TOL * max(1.0, abs(q)):
            small += 1
            if small >= 2:
                return q, -0.5 * dq
        else:
            small = 0
    raise NonConvergence(f"Q series stalled for nu={nu}, t={t}")


def _base_pair_s(nu: complex, tsmall: float, negative: bool):
    p, dp = _p_series_s(nu, tsmall)
    q, dq = _q_series_s(nu, tsmall)
    if not negative:
        return p, dp, q, dq
    cs = _cospi_c(nu)
    sn = _sinpi_c(nu)
    return (
        cs * p - (2.0 / math.pi) * sn * q,
        -(cs * dp - (2.0 / math.pi) * sn * dq),
        -cs * q - (math.pi / 2.0) * sn * p,
        cs * dq + (math.pi / 2.0) * sn * dp,
    )


def _pair_at_s(nu: complex, t_upper: float, t_lower: float):
    if t_upper <= 0.0 or t_lower <= 0.0:
        raise DomainError("argument outside the open interval (-1, 1)")
    if nu.imag != 0.0 and abs(nu.real + 0.5) > 1e-12:
        raise DomainError("complex degrees are supported only on Re(nu) = -1/2")
    if nu.imag == 0.0 and nu.real < -0.5:
        nu = complex(-1.0 - nu.real, 0.0)
    negative = t_lower < t_upper
    tsmall = t_lower if negative else t_upper
    steps = 0
    base = nu
    if nu.imag == 0.0 and nu.real >= 1.5:
        steps = int(math.floor(nu.real + 0.5))
        base = complex(nu.real - steps, 0.0)
    if steps == 0:
        return _base_pair_s(nu, tsmall, negative)
    x = 2.0 * t_lower - 1.0 if negative else 1.0 - 2.0 * t_upper
    p0, dp0, q0, dq0 = _base_pair_s(base, tsmall, negative)
    p1, dp1, q1, dq1 = _base_pair_s(base + 1.0, tsmall, negative)
    for s in range(steps - 1):
        d = base.real + 1.0 + s
        fac = 1.0 / (d + 1.0)
        p2 = fac * ((2.0 * d + 1.0) * x * p1 - d * p0)
        dp2 = fac * ((2.0 * d + 1.0) * (p1 + x * dp1) - d * dp0)
        q2 = fac * ((2.0 * d + 1.0) * x * q1 - d * q0)
        dq2 = fac * ((2.0 * d + 1.0) * (q1 + x * dq1) - d * dq0)
        p0, p1, dp0, dp1 = p1, p2, dp1, dp2
        q0, q1, dq0, dq1 = q1, q2, dq1, dq2
    return p1, dp1, q1, dq1


# ---------------------------------------------------------------------------
# public evaluation API


@dataclass(frozen=True)
class FunctionValuePair:
    """P_nu, dP_nu/dx, Q_nu, dQ_nu/dx at one point; complex end to end.

    For real degree and real argument the imaginary parts are round-off only;
    the pair satisfies p*q_prime - p_prime*q = 1/(1 - x^2).
    """

    p: complex
    p_prime: complex
    q: complex
    q_prime: complex


def legendre_pair(nu, x: float) -> FunctionValuePair:
    """Legendre P_nu, Q_nu and their x-derivatives at x in (-1, 1)."""
    if not abs(x) < 1.0:
        raise DomainError(f"x = {x!r} is outside (-1, 1)")
    val = _degree_value(nu)
    p, dp, q, dq = _pair_at_s(val, 0.5 * (1.0 - x), 0.5 * (1.0 + x))
    return FunctionValuePair(p, dp, q, dq)


def endpoint_limits(nu) -> tuple[complex, complex, complex, complex]:
    """Limits of (1 - x^2) * d/dx of P_nu and Q_nu at the interval ends.

    Returns (P at -1, P at +1, Q at -1, Q at +1) =
    (2*sin(pi*nu)/pi, 0, cos(pi*nu), 1).
    """
    val = _degree_value(nu)
    return (2.0 / math.pi) * _sinpi_c(val), 0.0 + 0.0j, _cospi_c(val), 1.0 + 0.0j


def legendre_polynomial(n: int, x) -> np.ndarray:
    """Classical Legendre polynomial P_n by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p_cur = x.copy()
    for k in range(1, n):
        p_prev, p_cur = p_cur, ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1)
    return p_cur


# ---------------------------------------------------------------------------
# sine integral and the indefinite-integration coefficient table


@lru_cache(maxsize=1)
def _gauss_rule() -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(24)


def sine_integral(z: float) -> float:
    """Si(z) = integral of sin(t)/t over (0, z), accurate to ~1e-15.

    Power series up to |z| = 12, panel Gauss-Legendre continuation up to 60,
    asymptotic auxiliary-function expansion beyond.
    """
    if z < 0.0:
        return -sine_integral(-z)
    if z <= 12.0:
        term = z
        total = z
        z2 = z * z
        m = 0
        while abs(term) > 1e-18 * abs(total) + 1e-300:
            term *= -z2 * (2 * m + 1) / ((2 * m + 3) ** 2 * (2 * m + 2))
            total += term
            m += 1
        return total
    if z <= 60.0:
        nodes, weights = _gauss_rule()
        total = sine_integral(12.0)
        a = 12.0
        while a < z:
            b = min(a + 2.0, z)
            mid = 0.5 * (a + b)
            half = 0.5 * (b - a)
            tt = mid + half * nodes
            total += half * float(np.sum(weights * np.sin(tt) / tt))
            a = b
        return total
    # auxiliary functions: Si = pi/2 - f cos z - g sin z
    inv2 = 1.0 / (z * z)
    f = 0.0
    g = 0.0
    tf = 1.0 / z
    tg = inv2
    for m in range(30):
        f += tf
        g += tg
        tf *= -(2 * m + 1) * (2 * m + 2) * inv2
        tg *= -(2 * m + 2) * (2 * m + 3) * inv2
        if abs(tf) < 1e-18:
            break
    return 0.5 * math.pi - f * math.cos(z) - g * math.sin(z)


def stenger_delta(k: int) -> float:
    """Coefficient delta_k = 1/2 + Si(pi*k)/pi of the indefinite sinc rule."""
    if k < 0:
        return 1.0 - stenger_delta(-k)
    return 0.5 + sine_integral(math.pi * k) / math.pi


def delta_table(K: int) -> np.ndarray:
    """delta_l for l = -2K .. 2K as an array indexed by l + 2K."""
    pos = np.array([stenger_delta(k) for k in range(2 * K + 1)])
    table = np.empty(4 * K + 1)
    table[2 * K:] = pos
    table[: 2 * K] = (1.0 - pos[1:])[::-1]
    return table
