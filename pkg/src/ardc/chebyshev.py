"""Fixed-degree Chebyshev objects on [-1, 1] and their rescaling to a step.

All grids use the Chebyshev extreme points ordered backwards,
``x_l = cos(l pi / n)`` for ``l = 0..n``, so index 0 is the right end of the
step and index ``n`` is the left end.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import InvalidParameterError, OutOfRangeError

N_MIN = 2
N_MAX = 64


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _extreme_points(n):
    # sin form gives exact symmetry, exact endpoints and an exact zero
    return np.sin(np.pi * (n - 2.0 * np.arange(n + 1)) / (2.0 * n))


def _diff_matrix(x):
    n = x.size - 1
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    np.fill_diagonal(D, 0.0)
    # negative-sum trick: rows annihilate constants to rounding
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def _cos_table(n, thetas, kmax):
    k = np.arange(kmax + 1)
    return np.cos(np.outer(thetas, k))


def _values_to_coeffs(n):
    """Matrix mapping node values to Chebyshev coefficients (DCT-I)."""
    l = np.arange(n + 1)
    # cos(k l pi / n) evaluated with an exactly reduced integer argument
    kl = np.mod(np.outer(l, l), 2 * n)
    C = np.cos(np.pi * kl / n)
    half = np.ones(n + 1)
    half[0] = half[-1] = 0.5
    T_inv = (2.0 / n) * C * half[None, :]
    T_inv[0, :] *= 0.5
    T_inv[-1, :] *= 0.5
    return T_inv


def _integration_coeffs(n):
    """Map coefficients c_0..c_n to antiderivative coefficients b_0..b_{n+1}.

    The constant b_0 is fixed so the antiderivative vanishes at -1.
    """
    B = np.zeros((n + 2, n + 1))
    B[1, 0] = 1.0
    if n >= 2:
        B[1, 2] = -0.5
    for k in range(2, n + 2):
        B[k, k - 1] += 1.0 / (2.0 * k)
        if k + 1 <= n:
            B[k, k + 1] -= 1.0 / (2.0 * k)
    signs = (-1.0) ** np.arange(n + 2)
    B[0, :] = -(signs[1:, None] * B[1:, :]).sum(axis=0)
    return B


def _clenshaw_curtis(n):
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    ii = np.arange(1, n)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
        v -= np.cos(n * theta[ii]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
    w[ii] = 2.0 * v / n
    return w


@dataclass(frozen=True, eq=False)
class ChebyshevBasis:
    """Spectral objects for an ``(n+1)``-point Chebyshev grid on [-1, 1].

    Attributes
    ----------
    n : int
        Degree; the grid has ``n + 1`` nodes.
    std_nodes : ndarray
        ``cos(l pi / n)``, strictly descending from 1 to -1.
    D_std : ndarray
        Differentiation matrix.
    Q_std : ndarray
        Antiderivative matrix; the result vanishes at the last node (-1).
    w_cc : ndarray
        Clenshaw-Curtis weights.
    L_mid : ndarray
        ``n x (n+1)`` interpolation matrix onto the half-circle midpoints
        ``cos(l pi / n + pi / (2n))``.
    mid_nodes : ndarray
        The midpoints themselves.
    bary_weights : ndarray
        Barycentric weights of the grid.
    P_coef : ndarray
        ``(n+2) x (n+1)`` map from node values to the Chebyshev coefficients
        of the interpolant's antiderivative, vanishing at -1.
    """

    n: int
    std_nodes: np.ndarray
    D_std: np.ndarray
    Q_std: np.ndarray
    w_cc: np.ndarray
    L_mid: np.ndarray
    mid_nodes: np.ndarray
    bary_weights: np.ndarray
    P_coef: np.ndarray


@lru_cache(maxsize=None)
def build_basis(n):
    """Build (once per ``n``) the :class:`ChebyshevBasis` of degree ``n``."""
    if int(n) != n or n < N_MIN or n > N_MAX:
        raise InvalidParameterError(f"node parameter n must be an integer in [{N_MIN}, {N_MAX}], got {n}")
    n = int(n)
    x = _extreme_points(n)
    D = _diff_matrix(x)

    theta = np.pi * np.arange(n + 1) / n
    T_inv = _values_to_coeffs(n)
    B_eval = _cos_table(n, theta, n + 1)
    P = _integration_coeffs(n) @ T_inv
    Q = B_eval @ P
    Q[-1, :] = 0.0

    theta_mid = np.pi * np.arange(n) / n + np.pi / (2 * n)
    L = _cos_table(n, theta_mid, n) @ T_inv

    bw = (-1.0) ** np.arange(n + 1)
    bw[0] *= 0.5
    bw[-1] *= 0.5

    return ChebyshevBasis(
        n=n,
        std_nodes=_frozen(x),
        D_std=_frozen(D),
        Q_std=_frozen(Q),
        w_cc=_frozen(_clenshaw_curtis(n)),
        L_mid=_frozen(L),
        mid_nodes=_frozen(np.cos(theta_mid)),
        bary_weights=_frozen(bw),
        P_coef=_frozen(P),
    )


def _check_h(h):
    if not h > 0 or not np.isfinite(h):
        raise InvalidParameterError(f"step length must be positive and finite, got {h}")


def scaled_nodes(basis, t_i, h):
    """Nodes ``t_i + (h/2)(1 + x_l)`` of the step ``[t_i, t_i + h]``, descending."""
    _check_h(h)
    return t_i + 0.5 * h * (1.0 + basis.std_nodes)


def scaled_midpoints(basis, t_i, h):
    _check_h(h)
    return t_i + 0.5 * h * (1.0 + basis.mid_nodes)


def scaled_diff(basis, h):
    _check_h(h)
    return (2.0 / h) * basis.D_std


def scaled_antideriv(basis, h):
    _check_h(h)
    return (0.5 * h) * basis.Q_std


def scaled_quad_weights(basis, h):
    _check_h(h)
    return (0.5 * h) * basis.w_cc


def interpolate_to_midpoints(basis, f_nodes):
    f_nodes = np.asarray(f_nodes)
    if not np.all(np.isfinite(f_nodes)):
        raise InvalidParameterError("node values must be finite")
    return basis.L_mid @ f_nodes


def barycentric_eval(basis, f_nodes, t_i, h, t_query):
    """Evaluate the degree-``n`` interpolant through ``(tau_l, f_l)``.

    ``t_query`` may be a scalar or an array; every entry must lie in
    ``[t_i, t_i + h]``.
    """
    _check_h(h)
    tq = np.asarray(t_query, dtype=float)
    t_end = t_i + h
    if np.any(tq < t_i) or np.any(tq > t_end):
        raise OutOfRangeError(f"query outside step [{t_i}, {t_end}]")
    nodes = scaled_nodes(basis, t_i, h)
    # pin the end nodes so the step boundaries are exact hits
    nodes[0] = t_end
    nodes[-1] = t_i
    out = _kernels.barycentric(nodes, basis.bary_weights, f_nodes, tq.ravel())
    if np.isrealobj(f_nodes):
        out = out.real
    return out.reshape(tq.shape) if tq.ndim else out[0]


def antiderivative_eval(basis, f_nodes, t_i, h, t_query):
    """``int_{t_i}^{t} p(s) ds`` for the degree-``n`` interpolant ``p`` of ``f_nodes``.

    The antiderivative has degree ``n + 1``; it is evaluated exactly from its
    Chebyshev coefficients rather than re-interpolated from node values.
    """
    _check_h(h)
    tq = np.asarray(t_query, dtype=float)
    if np.any(tq < t_i) or np.any(tq > t_i + h):
        raise OutOfRangeError(f"query outside step [{t_i}, {t_i + h}]")
    coef = basis.P_coef @ np.asarray(f_nodes)
    s = np.clip(2.0 * (tq - t_i) / h - 1.0, -1.0, 1.0)
    return 0.5 * h * np.polynomial.chebyshev.chebval(s, coef)
