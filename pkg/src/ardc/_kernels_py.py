"""Pure-Python (numpy) implementations of the hot kernels.

These are the reference versions; :mod:`ardc._core` provides compiled
equivalents with identical signatures and return values.
"""

import numpy as np

CONVERGED = 0
STALLED = 1
ITER_CAP = 2
DEGENERATE = 3


def defect_loop(D, omega, gamma, eps, j_max, stop=True, diff_form=True):
    """Run the discretized Riccati defect correction on one grid.

    Parameters
    ----------
    D : (m, m) float ndarray
        Differentiation matrix already scaled to the step.
    omega, gamma : (m,) float ndarray
        Coefficient values at the grid nodes.
    eps : float
        Residual tolerance (max-norm). Ignored when ``stop`` is false.
    j_max : int
        Maximum number of updates.
    stop : bool
        When false, exactly ``j_max`` updates are performed and every
        residual norm is recorded (used by the fixed-sweep experiments).
    diff_form : bool
        Form ``D omega`` from differences ``omega_k - omega_l`` so that
        constants map to exactly zero. When false the plain matrix-vector
        product is used and its rounding seeds the initial residual.

    Returns
    -------
    x, R : (m,) complex ndarray
        Returned iterate and its residual.
    norms : list of float
        Residual max-norm of every computed iterate, including a final
        rejected one when the iteration stalled.
    status : int
        One of ``CONVERGED``, ``STALLED``, ``ITER_CAP``, ``DEGENERATE``.
    j : int
        Index of the returned iterate.
    """
    D = np.asarray(D, dtype=float)
    omega = np.asarray(omega, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    x = 1j * omega
    # (i w)^2 + w^2 cancels exactly, leaving i(w' + 2 g w)
    if diff_form:
        dw = np.sum(D * (omega[None, :] - omega[:, None]), axis=1)
    else:
        dw = D @ omega
    R = 1j * (dw + 2.0 * gamma * omega)
    norm = float(np.max(np.abs(R)))
    norms = [norm]
    # i w is accepted untouched only when exact: a small absolute residual here
    # still leaves the amplitude term -w'/(2w) out, whose phase error grows with h
    if stop and norm == 0.0:
        return x, R, norms, CONVERGED, 0
    guard = 1e-14 * np.maximum(1.0, np.abs(omega))
    for j in range(j_max):
        s = x + gamma
        if np.any(np.abs(s) < guard):
            return x, R, norms, DEGENERATE, j
        delta = -R / (2.0 * s)
        x_new = x + delta
        # exact discrete identity R[x + d] = D d + d^2 once 2(x+g)d = -R[x]
        R_new = D @ delta + delta * delta
        norm_new = float(np.max(np.abs(R_new)))
        norms.append(norm_new)
        if stop and not norm_new < norm:
            return x, R, norms, (CONVERGED if norm < eps else STALLED), j
        x, R, norm = x_new, R_new, norm_new
        if stop and norm < eps:
            return x, R, norms, CONVERGED, j + 1
    return x, R, norms, ITER_CAP, j_max


def barycentric(nodes, weights, values, queries):
    """Evaluate the barycentric interpolant (second form) at ``queries``.

    Exact node hits return the stored value unchanged.
    """
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    values = np.asarray(values, dtype=complex)
    queries = np.atleast_1d(np.asarray(queries, dtype=float))
    diff = queries[:, None] - nodes[None, :]
    hit = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        c = weights / diff
        out = (c @ values) / np.sum(c, axis=1)
    rows = np.flatnonzero(hit.any(axis=1))
    out[rows] = values[np.argmax(hit[rows], axis=1)]
    return out
