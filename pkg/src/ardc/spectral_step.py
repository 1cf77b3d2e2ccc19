"""One nonoscillatory step by Chebyshev collocation of the full ODE."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .chebyshev import build_basis, scaled_antideriv, scaled_nodes
from .errors import NumericalFailureError, StepUnderflowError

N_MAX = 64
REL_FLOOR = 1e-280


@dataclass
class SpectralStepResult:
    accepted: bool
    u_end: complex
    du_end: complex
    n_used: int
    halvings: int
    rel_err_est: float
    h: float
    u_nodes: Optional[np.ndarray] = None
    du_nodes: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None
    n_ls: int = 0

    @property
    def dense_data(self):
        return {"u": self.u_nodes, "du": self.du_nodes}


def collocation_solve(basis, t_i, h, omega_vals, gamma_vals, u_i, du_i):
    """Collocation of ``u'' + 2 gamma u' + omega^2 u = 0`` on the step's nodes.

    The unknowns are ``v = u''`` at the nodes. With ``Q`` the antiderivative
    from ``t_i``,

        u' = du_i + Q v,    u = u_i + du_i (t - t_i) + Q Q v,

    so the initial conditions hold by construction and the ODE rows give the
    square system ``(I + 2 diag(gamma) Q + diag(omega^2) Q Q) v = rhs``. Unlike
    the system in ``D^2``, whose rounding grows like ``n^2``, this one is
    close to the identity for resolved steps. Returns ``(u, u')`` at the nodes.
    """
    Q = scaled_antideriv(basis, h)
    tau = scaled_nodes(basis, t_i, h) - t_i
    w2 = np.asarray(omega_vals, dtype=float) ** 2
    g = np.asarray(gamma_vals, dtype=float)
    u_i, du_i = complex(u_i), complex(du_i)
    QQ = Q @ Q
    A = np.eye(basis.n + 1) + 2.0 * g[:, None] * Q + w2[:, None] * QQ
    rhs = -(2.0 * g * du_i + w2 * (u_i + du_i * tau))
    try:
        sol = scipy.linalg.solve(A, np.column_stack([rhs.real, rhs.imag]))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailureError(f"collocation solve failed at t={t_i}: {exc}") from exc
    v = sol[:, 0] + 1j * sol[:, 1]
    du = du_i + Q @ v
    u = u_i + du_i * tau + QQ @ v
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(du))):
        raise NumericalFailureError(f"collocation solve produced non-finite values at t={t_i}")
    return u, du


def _grid_values(coeffs, basis, t_i, h, prev=None):
    """Coefficients on the grid, reusing the even-index values of a half grid."""
    nodes = scaled_nodes(basis, t_i, h)
    if prev is None:
        return coeffs.omega(nodes), coeffs.gamma(nodes)
    w_prev, g_prev = prev
    w = np.empty(nodes.size)
    g = np.empty(nodes.size)
    w[::2], g[::2] = w_prev, g_prev
    w[1::2] = coeffs.omega(nodes[1::2])
    g[1::2] = coeffs.gamma(nodes[1::2])
    return w, g


def _rel_diff(a, b):
    d = abs(a - b)
    den = abs(a)
    return d / den if den > REL_FLOOR else d


def spectral_step(t_i, h, coeffs, u_i, du_i, eps, base_n=16, n_max=N_MAX, h_min=0.0):
    """Collocation step with n-doubling error control and h-halving.

    ``coeffs`` is a :class:`~ardc.problem.CountingCoefficients`. The solution
    at ``n`` is compared with the one at ``2n``; on agreement within ``eps``
    the doubled solution is accepted. Otherwise ``n`` keeps doubling up to
    ``n_max``, after which ``h`` is halved and the step restarts.

    Returns a :class:`SpectralStepResult` whose ``h`` is the step actually
    taken.
    """
    if base_n < 4:
        raise ValueError("base_n must be at least 4")
    u_i, du_i = complex(u_i), complex(du_i)
    halvings = 0
    n_ls = 0
    h_hist = []
    while True:
        h_hist.append(h)
        if h < h_min:
            raise StepUnderflowError(f"spectral step below h_min at t={t_i}", t=t_i, h_history=h_hist)
        n = base_n
        basis = build_basis(n)
        vals = _grid_values(coeffs, basis, t_i, h)
        u, du = collocation_solve(basis, t_i, h, *vals, u_i, du_i)
        n_ls += 1
        err = np.inf
        while 2 * n <= n_max:
            n *= 2
            basis = build_basis(n)
            vals = _grid_values(coeffs, basis, t_i, h, vals)
            u2, du2 = collocation_solve(basis, t_i, h, *vals, u_i, du_i)
            n_ls += 1
            err = _rel_diff(u2[0], u[0])
            u, du = u2, du2
            if err <= eps:
                return SpectralStepResult(
                    accepted=True, u_end=complex(u[0]), du_end=complex(du[0]), n_used=n,
                    halvings=halvings, rel_err_est=float(err), h=h, u_nodes=u,
                    du_nodes=du, omega=vals[0], n_ls=n_ls)
        h = 0.5 * h
        halvings += 1
