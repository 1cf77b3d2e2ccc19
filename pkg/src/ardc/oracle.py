"""Reference solutions used to measure solver accuracy.

Nothing here shares code with the solver path. The Runge-Kutta reference is
scipy's DOP853; the special functions are evaluated from their series and
asymptotic expansions.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, OracleRefusal

AIRY_SERIES_MAX = 8.0
_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_MAI1 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)
_SQRT3 = math.sqrt(3.0)


@dataclass
class OracleResult:
    t: np.ndarray
    u: np.ndarray
    du: np.ndarray
    est_err: np.ndarray
    cost: int


# -- Airy ---------------------------------------------------------------------

def _airy_series(x):
    """Maclaurin series at real ``x``, summed in extended precision."""
    ld = np.longdouble
    x = ld(x)
    x3 = x * x * x
    a = ld(1)
    b = x
    f, g = a, b
    fp, gp = ld(0), ld(1)
    k = 0
    while True:
        k += 1
        a = a * x3 / ((3 * k - 1) * (3 * k))
        b = b * x3 / ((3 * k) * (3 * k + 1))
        f += a
        g += b
        # derivative terms: d/dx x^{3k} = 3k x^{3k-1}
        if x != 0:
            fp += 3 * k * a / x
            gp += (3 * k + 1) * b / x
        if k > 5 and abs(a) + abs(b) < ld(1e-22) * (abs(f) + abs(g)):
            break
        if k > 200:
            break
    c1, c2 = ld(_AI0), ld(_MAI1)
    ai = c1 * f - c2 * g
    bi = ld(_SQRT3) * (c1 * f + c2 * g)
    aip = c1 * fp - c2 * gp
    bip = ld(_SQRT3) * (c1 * fp + c2 * gp)
    return float(ai), float(bi), float(aip), float(bip)


def _reduced_phase(t):
    """``(2/3) t^{3/2} - pi/4`` reduced modulo 2 pi, accurate for huge ``t``."""
    digits = 25 + int(max(0.0, 1.5 * math.log10(max(t, 1.0))))
    with mpmath.workdps(digits):
        zeta = mpmath.mpf(2) / 3 * mpmath.mpf(t) ** mpmath.mpf(1.5)
        phi = zeta - mpmath.pi / 4
        phi = phi - 2 * mpmath.pi * mpmath.floor(phi / (2 * mpmath.pi))
        return float(phi)


def _airy_asymptotic(t):
    """Large-argument expansions of Ai(-t), Bi(-t) and derivatives."""
    zeta = 2.0 / 3.0 * t * math.sqrt(t)
    P = Qs = Pv = Qv = 0.0
    uk = 1.0
    prev = math.inf
    k = 0
    while True:
        vk = -(6 * k + 1) / (6 * k - 1) * uk if k else 1.0
        term = uk / zeta ** k
        if term > prev or term < 1e-18:
            break
        prev = term
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P += sign * term
            Pv += sign * vk / zeta ** k
        else:
            Qs += sign * term
            Qv += sign * vk / zeta ** k
        k += 1
        uk *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
    phi = _reduced_phase(t)
    c, s = math.cos(phi), math.sin(phi)
    amp = 1.0 / math.sqrt(math.pi)
    lo, hi = amp * t ** -0.25, amp * t ** 0.25
    ai = lo * (c * P + s * Qs)
    bi = lo * (-s * P + c * Qs)
    aip = hi * (s * Pv - c * Qv)
    bip = hi * (c * Pv + s * Qv)
    return ai, bi, aip, bip


def airy_ref(t, branch=None):
    """Return ``(Ai(-t), Bi(-t), Ai'(-t), Bi'(-t))`` for ``0 <= t <= 1e8``.

    ``branch`` forces ``"series"`` or ``"asymptotic"``; by default the
    series is used up to ``t = 8``.
    """
    t = float(t)
    if not 0.0 <= t <= 1e8:
        raise OracleRefusal(f"airy_ref supports 0 <= t <= 1e8, got {t}")
    if branch is None:
        branch = "series" if t <= AIRY_SERIES_MAX else "asymptotic"
    if branch == "series":
        return _airy_series(-t)
    if t <= 0.0:
        raise DomainError("asymptotic branch needs t > 0")
    return _airy_asymptotic(t)


def airy_solution(t):
    """``u = Ai(-t) + i Bi(-t)`` and ``u' = -Ai'(-t) - i Bi'(-t)`` at each ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u = np.empty(t.shape, dtype=complex)
    du = np.empty(t.shape, dtype=complex)
    for i, ti in enumerate(t):
        ai, bi, aip, bip = airy_ref(ti)
        u[i] = complex(ai, bi)
        du[i] = complex(-aip, -bip)
    return u, du


# -- Legendre -----------------------------------------------------------------

LEGENDRE_NU_MAX = 10 ** 6


def legendre_ref(nu, t):
    """``P_nu(t)`` and ``P_nu'(t)`` by forward recurrence in extended precision.

    Supports integer ``1 <= nu <= 1e6`` and ``t`` in ``[0, 0.9]``.
    """
    if int(nu) != nu or nu < 0:
        raise DomainError(f"nu must be a non-negative integer, got {nu}")
    nu = int(nu)
    if nu > LEGENDRE_NU_MAX:
        raise OracleRefusal(f"legendre_ref supports nu <= {LEGENDRE_NU_MAX}")
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt < 0.0) or np.any(tt > 0.9):
        raise OracleRefusal("legendre_ref supports t in [0, 0.9]")
    x = tt.astype(np.longdouble)
    p_prev = np.ones_like(x)
    p = x.copy()
    if nu == 0:
        return np.ones_like(tt), np.zeros_like(tt)
    for k in range(1, nu):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = nu * (x * p - p_prev) / (x * x - 1)
    return p.astype(float), dp.astype(float)


# -- log gamma ----------------------------------------------------------------

_STIRLING = (1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
             -691.0 / 360360, 1.0 / 156, -3617.0 / 122400)


def lngamma_ref(x):
    """Log-gamma by the Stirling series after upward shifting to ``x >= 15``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"lngamma_ref needs x > 0, got {x}")
    shift = 0.0
    while x < 15.0:
        shift -= math.log(x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    p = inv
    for c in _STIRLING:
        series += c * p
        p *= inv2
    return (x - 0.5) * math.log(x) - x + 0.5 * math.log(2.0 * math.pi) + series + shift


# -- Runge-Kutta reference ----------------------------------------------------

def _phase_estimate(coeffs, t0, t1):
    t = np.linspace(t0, t1, 2001)
    w = np.abs(np.asarray(coeffs.omega(t), dtype=float))
    return float(np.trapezoid(w, t))


def rk_reference(ivp, abs_tol=1e-13, rel_tol=1e-13, t_eval=None, budget=1e8):
    """Integrate ``ivp`` with DOP853 and estimate its own error.

    The error estimate is the difference to a second run at ten times the
    tolerances. Requests whose estimated right-hand-side count exceeds
    ``budget`` are refused.
    """
    coeffs = ivp.coeffs
    periods = _phase_estimate(coeffs, ivp.t0, ivp.t1) / (2 * math.pi)
    est_cost = 2 * 12 * 12 * (periods + 10.0)
    if est_cost > budget:
        raise OracleRefusal(f"estimated cost {est_cost:.3g} exceeds budget {budget:.3g}")

    count = [0]

    def rhs(t, y):
        count[0] += 1
        tt = np.array(t)
        w = float(coeffs.omega(tt))
        g = float(coeffs.gamma(tt)) if coeffs.has_gamma else 0.0
        return np.array([y[1], -2.0 * g * y[1] - w * w * y[0]])

    if t_eval is None:
        t_eval = np.array([ivp.t1])
    t_eval = np.asarray(t_eval, dtype=float)
    y0 = np.array([ivp.u0, ivp.du0], dtype=complex)

    def run(factor):
        sol = solve_ivp(rhs, (ivp.t0, ivp.t1), y0, method="DOP853", t_eval=t_eval,
                        rtol=rel_tol * factor, atol=abs_tol * factor, dense_output=False)
        if not sol.success:
            raise OracleRefusal(f"DOP853 failed: {sol.message}")
        return sol.y

    y = run(1.0)
    y_loose = run(10.0)
    est = np.abs(y[0] - y_loose[0])
    return OracleResult(t=t_eval, u=y[0], du=y[1], est_err=est, cost=count[0])
