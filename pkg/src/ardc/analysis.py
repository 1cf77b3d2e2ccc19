"""Numerical checks of the residual theory and the residual-decay experiments.

The bound being checked: if ``omega`` and ``gamma`` are analytic on the
closed ball of radius ``rho`` about ``t`` with

    eta1 <= |omega| <= eta2,  |omega'| <= eta3 <= eta1^2 / 17,
    |gamma| <= eta4 <= eta1^2 / (34 eta2),

then after ``j <= k`` defect-correction sweeps the residual at ``t`` obeys
``|R_j(t)| <= eta3~ r^j`` whenever ``r(k) <= 3/4``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .chebyshev import build_basis, scaled_diff, scaled_nodes
from .errors import InvalidBallError, InvalidParameterError
from .problem import burst_coeffs, burst_m

N_CIRCLES = 8
SAMPLES_PER_CIRCLE = 256
ROUNDING_FLOOR = 1e-13


@dataclass
class BallBounds:
    t_center: float
    rho: float
    eta1: float
    eta2: float
    eta3: float
    eta4: float
    samples_per_circle: int = SAMPLES_PER_CIRCLE

    @property
    def preconditions(self):
        """Whether the derivative and damping hypotheses hold."""
        ok3 = self.eta3 <= self.eta1 ** 2 / 17.0
        ok4 = self.eta4 <= self.eta1 ** 2 / (34.0 * self.eta2) if self.eta2 > 0 else False
        return bool(self.eta1 > 0 and ok3 and ok4)


@dataclass
class TheoremCheck:
    applicable: bool
    eta_t1: float = math.nan
    eta_t2: float = math.nan
    eta_t3: float = math.nan
    k_max: int = -1
    r: list = field(default_factory=list)
    bound_per_j: list = field(default_factory=list)
    observed_per_j: list = field(default_factory=list)
    holds: list = field(default_factory=list)
    reason: str = ""

    @property
    def all_hold(self):
        return self.applicable and all(h for h in self.holds if h is not None)

    def rows(self):
        """``(j, r, bound, observed, holds)`` per checked iteration."""
        return list(zip(range(len(self.bound_per_j)), self.r, self.bound_per_j,
                        self.observed_per_j, self.holds))


def _complex_eval(f, z):
    with np.errstate(all="ignore"):
        v = np.asarray(f(z), dtype=complex)
    return np.broadcast_to(v, z.shape)


def _analytic_on_circles(vals, centre, theta, tol=1e-8):
    # Cauchy moments: for f analytic inside, mean f = f(t) and mean f e^{ik theta} = 0
    # for k >= 1; a pole or branch cut inside breaks these identities
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    for k in range(3):
        m = np.mean(vals * np.exp(1j * k * theta)[None, :], axis=1)
        target = centre if k == 0 else 0.0
        if np.any(np.abs(m - target) > tol * scale):
            return False
    return True


def compute_ball_bounds(coeffs, t, rho, samples=SAMPLES_PER_CIRCLE, n_circles=N_CIRCLES):
    """Bounds on ``|omega|``, ``|omega'|`` and ``|gamma|`` over a closed ball.

    Maxima are taken on the outer circle (maximum modulus); the minimum of
    ``|omega|`` is taken over every sampled circle plus the centre.
    ``|omega'|`` uses complex central differences.
    """
    if not rho > 0:
        raise InvalidParameterError("rho must be positive")
    w_c = coeffs.complex_omega()
    g_c = coeffs.complex_gamma()
    theta = 2.0 * np.pi * np.arange(samples) / samples
    radii = rho * np.arange(1, n_circles + 1) / n_circles
    z = np.concatenate([[complex(t)], (t + radii[:, None] * np.exp(1j * theta)).ravel()])
    w = _complex_eval(w_c, z)
    if not np.all(np.isfinite(w)):
        raise InvalidBallError(f"omega is not finite on the ball about {t} of radius {rho}")
    aw = np.abs(w)
    # a pole inside shows up as values far above those at the centre
    if aw.max() > 1e8 * max(aw[0], 1e-300):
        raise InvalidBallError(f"omega appears singular inside the ball about {t}")
    if not _analytic_on_circles(w[1:].reshape(n_circles, samples), w[0], theta):
        raise InvalidBallError(f"omega is not analytic inside the ball about {t}")
    outer = z[-samples:]
    d = 1e-6 * rho
    dw = (_complex_eval(w_c, outer + d) - _complex_eval(w_c, outer - d)) / (2.0 * d)
    eta4 = 0.0
    if g_c is not None:
        g = _complex_eval(g_c, outer)
        if not np.all(np.isfinite(g)):
            raise InvalidBallError(f"gamma is not finite on the ball about {t}")
        eta4 = float(np.max(np.abs(g)))
    eta3 = float(np.max(np.abs(dw)))
    # differencing a constant leaves pure rounding; report it as zero
    if eta3 <= 1e-9 * float(aw.max()):
        eta3 = 0.0
    return BallBounds(float(t), float(rho), float(aw.min()), float(aw[-samples:].max()),
                      eta3, eta4, samples)


def theorem_constants(b):
    """``(eta1~, eta2~, eta3~)`` from ball bounds."""
    e3 = b.eta3 + 2.0 * b.eta2 * b.eta4
    shift = 17.0 * e3 / (4.0 * b.eta1)
    return b.eta1 - b.eta4 - shift, b.eta2 + b.eta4 + shift, e3


def rate(k, et1, et2, et3, rho):
    """The geometric rate ``r(k)``."""
    return k * (1.0 + et2 / et1) / (2.0 * et1 * rho) + et3 / (4.0 * et1 ** 2)


def largest_k(et1, et2, et3, rho, cap=10 ** 6):
    """Largest ``k`` with ``r(k) <= 3/4`` (``-1`` if none)."""
    alpha = (1.0 + et2 / et1) / (2.0 * et1 * rho)
    c = et3 / (4.0 * et1 ** 2)
    if c > 0.75:
        return -1
    k = int(math.floor((0.75 - c) / alpha))
    while k >= 0 and rate(k, et1, et2, et3, rho) > 0.75:
        k -= 1
    return min(k, cap)


def observed_residuals(coeffs, t, rho, j_max, n=64):
    """``|R_j(t)|`` for ``j = 0..j_max`` on an ``n``-point grid over ``[t - rho, t + rho]``.

    The sweep stops at the first ``j`` whose residual fails to decrease,
    where rounding has taken over; later entries are omitted.
    """
    if n % 2:
        raise InvalidParameterError("n must be even so the centre is a node")
    basis = build_basis(n)
    h = 2.0 * rho
    nodes = scaled_nodes(basis, t - rho, h)
    nodes[n // 2] = t
    w = np.asarray(coeffs.omega(nodes), dtype=float)
    g = (np.asarray(coeffs.gamma(nodes), dtype=float) if coeffs.has_gamma
         else np.zeros_like(w))
    D = scaled_diff(basis, h)
    c = n // 2
    out = []
    x = 1j * w
    R = 1j * (np.sum(D * (w[None, :] - w[:, None]), axis=1) + 2.0 * g * w)
    prev = math.inf
    for j in range(j_max + 1):
        val = abs(R[c])
        if not val < prev and j > 0:
            break
        out.append(float(val))
        prev = val
        delta = -R / (2.0 * (x + g))
        x = x + delta
        R = D @ delta + delta * delta
    return out


def check_theorem(bounds, coeffs, n=64, j_cap=40):
    """Compare observed residuals at the ball centre with the theorem bound.

    Rows ``j = 0..min(k_max, j_cap)`` are produced; rows past the point
    where rounding stops the observation carry ``None``. A row holds when
    ``observed <= max(bound, 1e-13 eta2^2)``.
    """
    if not bounds.preconditions:
        return TheoremCheck(False, reason="ball bounds violate the theorem hypotheses")
    et1, et2, et3 = theorem_constants(bounds)
    if not et1 > 0:
        return TheoremCheck(False, reason="eta1~ is not positive")
    k_max = largest_k(et1, et2, et3, bounds.rho)
    if k_max < 0:
        return TheoremCheck(False, et1, et2, et3, k_max, reason="r(0) exceeds 3/4")
    rows = min(k_max, j_cap)
    rs = [rate(j, et1, et2, et3, bounds.rho) for j in range(rows + 1)]
    bound = [et3 * r ** j if j else et3 for j, r in enumerate(rs)]
    obs = observed_residuals(coeffs, bounds.t_center, bounds.rho, rows, n)
    floor = ROUNDING_FLOOR * bounds.eta2 ** 2
    observed, holds = [], []
    for j in range(rows + 1):
        if j < len(obs):
            observed.append(obs[j])
            holds.append(bool(obs[j] <= max(bound[j], floor)))
        else:
            observed.append(None)
            holds.append(None)
    return TheoremCheck(True, et1, et2, et3, k_max, rs, bound, observed, holds)


def superasymptotic_check(bounds, coeffs, n=64):
    """Check ``|R_k(t)| <= e eta3~ exp(-1/(5 alpha))`` for ``k`` in ``[1/(5 alpha) - 1, 1/(5 alpha))``.

    Returns ``(k, observed, bound, holds)``. When rounding ends the sweep
    before ``k``, the last observed value is used (the residual only
    decreases up to that point).
    """
    et1, et2, et3 = theorem_constants(bounds)
    alpha = (1.0 + et2 / et1) / (2.0 * et1 * bounds.rho)
    k = max(0, math.ceil(1.0 / (5.0 * alpha) - 1.0))
    obs = observed_residuals(coeffs, bounds.t_center, bounds.rho, k, n)
    val = obs[min(k, len(obs) - 1)]
    bound = math.e * et3 * math.exp(-1.0 / (5.0 * alpha))
    floor = ROUNDING_FLOOR * bounds.eta2 ** 2
    return k, val, bound, bool(val <= max(bound, floor))


def constant_limit_k(omega_rho):
    """Largest ``k`` with ``k / (omega rho) <= 3/4``, the constant-coefficient limit."""
    return int(math.floor(0.75 * omega_rho + 1e-12))


def _burst_grid(omega_max, n, interval):
    basis = build_basis(n)
    a, b = interval
    h = b - a
    w = burst_coeffs(burst_m(omega_max)).omega(scaled_nodes(basis, a, h))
    return basis, h, w


def _sweep(basis, h, w, j_max):
    # plain D @ omega: its rounding is the seed of the kink these sweeps show
    D = scaled_diff(basis, h)
    return _kernels.defect_loop(D, w, np.zeros_like(w), 0.0, j_max, False, False)[2]


def residual_decay_experiment(omega_max_list=(10.0, 1e2, 1e3, 1e4), n=16,
                              interval=(0.0, 0.5), j_max=12):
    """Residual max-norm against sweep index for Burst at several peak frequencies.

    Returns a dict ``{omega_max: [res_norm_0, ..., res_norm_jmax]}``.
    """
    out = {}
    for wm in omega_max_list:
        basis, h, w = _burst_grid(wm, n, interval)
        out[float(wm)] = _sweep(basis, h, w, j_max)
    return out


def roundoff_model_experiment(omega_const, n=16, interval=(0.0, 0.5), j_max=12):
    """The same sweep for constant ``omega``, whose exact residual is zero."""
    basis = build_basis(n)
    h = interval[1] - interval[0]
    w = np.full(n + 1, float(omega_const))
    return _sweep(basis, h, w, j_max)


def burst_min_omega(omega_max, interval=(0.0, 0.5)):
    """Minimum of the Burst frequency over ``interval`` (attained at the far end)."""
    t = max(abs(interval[0]), abs(interval[1]))
    return float(omega_max) / (1.0 + t * t)


def decay_factor(norms, j_lo=1, j_hi=4):
    """Geometric per-sweep reduction factor fitted over ``j_lo..j_hi``."""
    j = np.arange(j_lo, j_hi + 1)
    slope = np.polyfit(j, np.log(np.asarray(norms)[j_lo:j_hi + 1]), 1)[0]
    return float(np.exp(slope))


def k_eps_heuristic(eps, rho, omega):
    """Predicted sweep count ``ceil(log(1/eps) / log(rho omega))``.

    Returns ``None`` when ``rho omega <= 1``, where the prediction does not
    apply.
    """
    ro = rho * omega
    if not ro > 1.0:
        return None
    if not 0 < eps <= 1:
        raise InvalidParameterError("eps must lie in (0, 1]")
    return max(0, math.ceil(math.log(1.0 / eps) / math.log(ro) - 1e-9))
