"""One oscillatory step: defect correction of the Riccati phase derivative.

On a step ``[t_i, t_i + h]`` the phase derivative ``x = (log u)'`` solves
``x' + x^2 + 2 gamma x + omega^2 = 0``. Starting from ``x = i omega`` the
update ``x <- x - R[x] / (2 (x + gamma))`` shrinks the residual by roughly a
factor ``omega`` per sweep until discretization or rounding takes over.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .chebyshev import scaled_antideriv, scaled_diff, scaled_quad_weights
from .errors import DegenerateDenominatorError, DegenerateMatchingError

J_MAX = 32


@dataclass
class RiccatiIterate:
    """Node values of one iterate together with its residual."""

    x: np.ndarray
    residual: np.ndarray
    res_norm: float
    j: int
    history: list = field(default_factory=list)


@dataclass
class RiccatiStepResult:
    accepted: bool
    u_end: complex
    du_end: complex
    x_plus: np.ndarray
    phase_increment: complex
    iterations: int
    res_norm_final: float
    A_plus: complex
    A_minus: complex
    t_i: float
    h: float
    z_plus: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None
    gamma: Optional[np.ndarray] = None

    @property
    def dense_data(self):
        return {"z_plus": self.z_plus, "x_plus": self.x_plus,
                "A_plus": self.A_plus, "A_minus": self.A_minus}


def riccati_residual(basis, h, x, omega_vals, gamma_vals):
    """``R[x] = D x + x^2 + 2 gamma x + omega^2`` at the nodes, from scratch.

    ``D x`` is applied to differences ``x_m - x_l``, which is the same sum
    in exact arithmetic but maps constants to exactly zero.
    """
    x = np.asarray(x, dtype=complex)
    omega_vals = np.asarray(omega_vals, dtype=float)
    gamma_vals = np.asarray(gamma_vals, dtype=float)
    dx = np.sum(scaled_diff(basis, h) * (x[None, :] - x[:, None]), axis=1)
    return dx + x * x + 2.0 * gamma_vals * x + omega_vals ** 2


def one_defect_iteration(basis, h, x, omega_vals, gamma_vals, residual=None):
    """Apply one update and return ``(x_new, R[x_new])``.

    The new residual is recomputed directly from ``x_new``.
    """
    x = np.asarray(x, dtype=complex)
    if residual is None:
        residual = riccati_residual(basis, h, x, omega_vals, gamma_vals)
    s = x + gamma_vals
    guard = 1e-14 * np.maximum(1.0, np.abs(omega_vals))
    if np.any(np.abs(s) < guard):
        raise DegenerateDenominatorError("x + gamma vanished at a node")
    x_new = x - residual / (2.0 * s)
    return x_new, riccati_residual(basis, h, x_new, omega_vals, gamma_vals)


def riter_rhs(basis, h, x, gamma_vals, residual):
    """Residual of the next iterate predicted by the quotient-rule recurrence.

    Derivatives are taken spectrally; used as a cross-check against
    :func:`riccati_residual`.
    """
    D = scaled_diff(basis, h)
    s = np.asarray(x, dtype=complex) + gamma_vals
    ds = D @ s
    dR = D @ residual
    q = residual / (2.0 * s)
    return (ds / s * residual - dR) / (2.0 * s) + q * q


def defect_correct(basis, t_i, h, omega_vals, gamma_vals, eps, branch=1, j_max=J_MAX):
    """Iterate until the residual max-norm drops below ``eps`` or stalls.

    Returns ``(iterate, converged)``. On a stall the previous (best) iterate
    is returned. ``branch=-1`` gives the conjugate solution.
    """
    D = scaled_diff(basis, h)
    omega_vals = np.asarray(omega_vals, dtype=float)
    gamma_vals = np.asarray(gamma_vals, dtype=float)
    x, R, norms, status, j = _kernels.defect_loop(D, omega_vals, gamma_vals, eps, j_max, True)
    if status == _kernels.DEGENERATE:
        raise DegenerateDenominatorError(f"x + gamma vanished at a node on step starting at {t_i}")
    if branch < 0:
        x, R = np.conj(x), np.conj(R)
    it = RiccatiIterate(x=x, residual=R, res_norm=float(np.max(np.abs(R))), j=j, history=norms)
    return it, status == _kernels.CONVERGED


def fixed_sweep(basis, h, omega_vals, gamma_vals, n_iter, diff_form=True):
    """Residual norms of iterates ``0..n_iter`` with no stopping rule."""
    D = scaled_diff(basis, h)
    _, _, norms, _, _ = _kernels.defect_loop(
        D, np.asarray(omega_vals, float), np.asarray(gamma_vals, float), 0.0, n_iter, False,
        diff_form)
    return norms


def _matching_coefficients(x0, u_i, du_i):
    xm = np.conj(x0)
    det = xm - x0
    if abs(det.imag) <= 1e-300 or abs(det) <= 1e-14 * abs(x0):
        raise DegenerateMatchingError("Im x_plus(t_i) vanishes; branches coincide")
    A_plus = (xm * u_i - du_i) / det
    A_minus = (du_i - x0 * u_i) / det
    return A_plus, A_minus


def combine(A_plus, A_minus, z, x):
    """``u`` and ``u'`` from the two conjugate branches."""
    ep = np.exp(z)
    em = np.exp(np.conj(z))
    u = A_plus * ep + A_minus * em
    du = A_plus * x * ep + A_minus * np.conj(x) * em
    return u, du


def match_and_reconstruct(basis, t_i, h, x_plus, u_i, du_i, endpoint_only=False,
                          iterations=0, res_norm=0.0, omega_vals=None, gamma_vals=None):
    """Match ``(u_i, du_i)`` at ``t_i`` and build the solution at ``t_i + h``."""
    x_plus = np.asarray(x_plus, dtype=complex)
    A_plus, A_minus = _matching_coefficients(x_plus[-1], complex(u_i), complex(du_i))
    if endpoint_only:
        z_end = complex(scaled_quad_weights(basis, h) @ x_plus)
        z_plus = None
    else:
        z_plus = scaled_antideriv(basis, h) @ x_plus
        z_end = complex(z_plus[0])
    u_end, du_end = combine(A_plus, A_minus, z_end, x_plus[0])
    return RiccatiStepResult(
        accepted=True, u_end=complex(u_end), du_end=complex(du_end), x_plus=x_plus,
        phase_increment=z_end, iterations=iterations, res_norm_final=res_norm,
        A_plus=A_plus, A_minus=A_minus, t_i=t_i, h=h, z_plus=z_plus,
        omega=omega_vals, gamma=gamma_vals)


def riccati_step(basis, t_i, h, omega_vals, gamma_vals, u_i, du_i, eps,
                 endpoint_only=False, j_max=J_MAX):
    """Defect correction followed by matching.

    Returns ``(result, iterate)``; ``result`` is ``None`` when the iteration
    did not reach ``eps``.
    """
    it, converged = defect_correct(basis, t_i, h, omega_vals, gamma_vals, eps, j_max=j_max)
    if not converged:
        return None, it
    res = match_and_reconstruct(basis, t_i, h, it.x, u_i, du_i, endpoint_only=endpoint_only,
                                iterations=it.j, res_norm=it.res_norm,
                                omega_vals=omega_vals, gamma_vals=gamma_vals)
    return res, it


def ode_relative_residual(basis, h, result, omega_vals=None, gamma_vals=None):
    """``(u'' + 2 gamma u' + omega^2 u) / u`` for the single branch ``u = e^{z_+}``.

    ``u`` is differentiated through its logarithm, ``u'/u = z'`` and
    ``u''/u = z'' + z'^2``, with spectral derivatives of the node values of
    ``z_+``. Nodes where ``e^{z_+}`` underflows are returned as NaN.
    """
    if result.z_plus is None:
        raise ValueError("result has no node phase values (endpoint-only step)")
    omega_vals = result.omega if omega_vals is None else omega_vals
    gamma_vals = result.gamma if gamma_vals is None else gamma_vals
    D = scaled_diff(basis, h)
    z = result.z_plus
    dz = D @ z
    d2z = D @ dz
    rel = d2z + dz * dz + 2.0 * gamma_vals * dz + np.asarray(omega_vals) ** 2
    vanished = np.exp(z.real) == 0.0
    rel = rel.astype(complex)
    rel[vanished] = np.nan
    return rel
