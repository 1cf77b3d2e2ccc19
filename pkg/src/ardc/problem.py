"""Initial value problems ``u'' + 2 gamma(t) u' + omega(t)^2 u = 0``.

Coefficients are vectorized callables: they receive a numpy array of times
and return an array of the same shape. ``gamma=None`` means identically
zero and costs no evaluations.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InvalidParameterError

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CoefficientPair:
    """Frequency and damping evaluators.

    ``omega_complex``/``gamma_complex`` are only needed by the ball-bound
    validator; when omitted the real evaluators are tried with complex input.
    """

    omega: Evaluator
    gamma: Optional[Evaluator] = None
    omega_complex: Optional[Evaluator] = None
    gamma_complex: Optional[Evaluator] = None
    description: str = ""
    # open interval of validity; evaluation outside raises DomainError
    domain: tuple = (-math.inf, math.inf)

    @property
    def has_gamma(self):
        return self.gamma is not None

    def complex_omega(self):
        return self.omega_complex or self.omega

    def complex_gamma(self):
        if self.gamma is None:
            return None
        return self.gamma_complex or self.gamma

    @classmethod
    def constant(cls, omega0, gamma0=0.0):
        """Constant coefficients, mostly useful as an exact test case."""
        w0, g0 = float(omega0), float(gamma0)

        def omega(t):
            return np.full(np.shape(t), w0, dtype=np.result_type(t, float))

        def const_gamma(t):
            return np.full(np.shape(t), g0, dtype=np.result_type(t, float))

        return cls(omega, const_gamma if g0 != 0.0 else None,
                   description=f"constant(omega={w0}, gamma={g0})")


class CountingCoefficients:
    """Per-solve wrapper that counts scalar evaluations of omega and gamma."""

    def __init__(self, coeffs):
        self.coeffs = coeffs
        self.n_f = 0

    @property
    def has_gamma(self):
        return self.coeffs.has_gamma

    def _check(self, t):
        lo, hi = self.coeffs.domain
        if np.any(t <= lo) or np.any(t >= hi):
            raise DomainError(f"{self.coeffs.description}: evaluation outside ({lo}, {hi})")

    def omega(self, t):
        t = np.asarray(t, dtype=float)
        self._check(t)
        self.n_f += t.size
        return np.asarray(self.coeffs.omega(t), dtype=float)

    def gamma(self, t):
        t = np.asarray(t, dtype=float)
        if not self.coeffs.has_gamma:
            return np.zeros_like(t)
        self._check(t)
        self.n_f += t.size
        return np.asarray(self.coeffs.gamma(t), dtype=float)


def eval_coeffs_on_grid(coeffs, nodes):
    """Return ``(omega(nodes), gamma(nodes))``.

    ``coeffs`` may be a :class:`CoefficientPair` or a
    :class:`CountingCoefficients`; only the latter accumulates ``n_f``.
    """
    if isinstance(coeffs, CoefficientPair):
        coeffs = CountingCoefficients(coeffs)
    return coeffs.omega(nodes), coeffs.gamma(nodes)


@dataclass(frozen=True)
class InitialValueProblem:
    coeffs: CoefficientPair
    t0: float
    t1: float
    u0: complex
    du0: complex
    h_init: float
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.t0 < self.t1:
            raise InvalidParameterError(f"need t0 < t1, got [{self.t0}, {self.t1}]")
        if not self.h_init > 0:
            raise InvalidParameterError("h_init must be positive")
        if not (np.isfinite(self.u0) and np.isfinite(self.du0)):
            raise InvalidParameterError("initial data must be finite")


# -- built-in problems -------------------------------------------------------

def airy_coeffs():
    return CoefficientPair(
        omega=lambda t: np.sqrt(t),
        description="airy",
        domain=(0.0, math.inf),
    )


def bremer237_coeffs(lam):
    lam = float(lam)
    return CoefficientPair(
        omega=lambda t: lam * np.sqrt(1.0 - t * t * np.cos(3.0 * t)),
        description=f"bremer237(lambda={lam:g})",
    )


def legendre_coeffs(nu):
    nn1 = float(nu) * (float(nu) + 1.0)
    return CoefficientPair(
        omega=lambda t: np.sqrt(nn1 / (1.0 - t * t)),
        gamma=lambda t: -t / (1.0 - t * t),
        description=f"legendre(nu={nu})",
        domain=(-1.0, 1.0),
    )


def burst_coeffs(m):
    wmax = math.sqrt(float(m) ** 2 - 1.0)
    return CoefficientPair(
        omega=lambda t: wmax / (1.0 + t * t),
        description=f"burst(m={m:g})",
    )


def burst_m(omega_max):
    """Burst parameter ``m`` giving peak frequency ``omega_max``."""
    return math.sqrt(float(omega_max) ** 2 + 1.0)


@dataclass(frozen=True)
class BuiltinProblem:
    """One of ``airy``, ``bremer237``, ``legendre``, ``burst`` with its parameter."""

    name: str
    param: Optional[float] = None

    @classmethod
    def airy(cls):
        return cls("airy")

    @classmethod
    def bremer237(cls, lam):
        return cls("bremer237", lam)

    @classmethod
    def legendre(cls, nu):
        return cls("legendre", nu)

    @classmethod
    def burst(cls, m):
        return cls("burst", m)


def _legendre_origin_data(nu):
    """``P_nu(0)`` and ``P_nu'(0)`` for integer ``nu`` via log-gamma."""
    if nu % 2 == 0:
        p = (-1.0) ** (nu // 2) * math.exp(
            math.lgamma(nu / 2 + 0.5) - math.lgamma(nu / 2 + 1.0)) / math.sqrt(math.pi)
        return p, 0.0
    dp = (-1.0) ** ((nu - 1) // 2) * 2.0 * math.exp(
        math.lgamma(nu / 2 + 1.0) - math.lgamma(nu / 2 + 0.5)) / math.sqrt(math.pi)
    return 0.0, dp


def builtin_ivp(p):
    """Interval and initial data of a built-in problem."""
    if p.name == "airy":
        from .oracle import airy_ref

        ai, bi, aip, bip = airy_ref(1.0)
        return InitialValueProblem(
            airy_coeffs(), 1.0, 1e8, complex(ai, bi), complex(-aip, -bip),
            h_init=0.1, name="airy")
    if p.name == "bremer237":
        lam = float(p.param)
        if not 10.0 <= lam <= 1e7:
            raise InvalidParameterError(f"lambda must lie in [10, 1e7], got {lam}")
        return InitialValueProblem(
            bremer237_coeffs(lam), -1.0, 1.0, 0.0, complex(lam),
            h_init=0.1, name="bremer237", params={"lambda": lam})
    if p.name == "legendre":
        nu = p.param
        if nu is None or int(nu) != nu or nu < 1:
            raise InvalidParameterError(f"nu must be an integer >= 1, got {nu}")
        nu = int(nu)
        u0, du0 = _legendre_origin_data(nu)
        return InitialValueProblem(
            legendre_coeffs(nu), 0.0, 0.9, complex(u0), complex(du0),
            h_init=0.1, name="legendre", params={"nu": nu})
    if p.name == "burst":
        m = float(p.param)
        if not m > 1.0:
            raise InvalidParameterError(f"m must exceed 1, got {m}")
        coeffs = burst_coeffs(m)
        w0 = float(coeffs.omega(np.array(0.0)))
        return InitialValueProblem(
            coeffs, 0.0, 0.5, 1.0 + 0j, 1j * w0,
            h_init=0.1, name="burst", params={"m": m})
    raise InvalidParameterError(f"unknown built-in problem {p.name!r}")
