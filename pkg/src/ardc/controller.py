"""Stepsize proposals and the choice between oscillatory and spectral steps."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chebyshev import build_basis, scaled_diff, scaled_midpoints, scaled_nodes
from .errors import StepUnderflowError

OSC_FACTOR = 5.0
PHASE_THRESHOLD = 2.0 * math.pi
SIGMA = 0.8
EPS_H = 1e-13
MAX_OSC_REFINE = 20
MAX_SLO_HALVINGS = 60


@dataclass
class StepProposal:
    h_osc: float
    h_slo: float
    choice: str
    omega_ti: float
    domega_ti: float
    # coefficient values on the refined oscillatory grid, reused by the step
    grid: Optional[tuple] = None


def derivative_at_start(basis, h, omega_vals):
    """``omega`` and ``omega'`` at the left node of a grid.

    The grids are ordered right to left, so the left end is the last node.
    """
    d = scaled_diff(basis, h) @ omega_vals
    return float(omega_vals[-1]), float(d[-1])


def derivative_at_end(basis, h, omega_vals):
    """``omega`` and ``omega'`` at the right node (index 0) of a grid."""
    d = scaled_diff(basis, h) @ omega_vals
    return float(omega_vals[0]), float(d[0])


def initial_estimates(omega_ti, domega_ti, remaining, h_init=None):
    """``h_osc0 = |omega / omega'|`` and ``h_slo0 = 1 / omega``, clamped.

    When ``omega_ti <= 0`` only a spectral step makes sense; ``h_slo0`` then
    falls back to ``h_init`` (or the remaining interval).
    """
    if not omega_ti > 0.0:
        h = remaining if h_init is None else min(h_init, remaining)
        return 0.0, h
    h_osc = abs(omega_ti / domega_ti) if domega_ti != 0.0 else math.inf
    return min(h_osc, remaining), min(1.0 / omega_ti, remaining)


def interpolation_error(basis, f_nodes, f_mid):
    """``Delta_n[f]``: worst relative error of the interpolant at the midpoints.

    Midpoints where ``f`` vanishes use the absolute error scaled by the
    largest node value.
    """
    approx = basis.L_mid @ f_nodes
    den = np.abs(f_mid)
    scale = float(np.max(np.abs(f_nodes)))
    if scale == 0.0 and not np.any(f_mid):
        return 0.0
    den = np.where(den > 0.0, den, scale if scale > 0.0 else 1.0)
    return float(np.max(np.abs(f_mid - approx) / den))


def refine_osc_h(basis, coeffs, t_i, h0, eps_h=EPS_H, max_refine=MAX_OSC_REFINE):
    """Shrink ``h`` until the degree-``n`` interpolant of the coefficients is
    accurate to ``eps_h`` at the half-circle midpoints.

    Returns ``(h, (omega_nodes, gamma_nodes))`` where the node values belong
    to the final grid so the step can reuse them.
    """
    h = h0
    n = basis.n
    for _ in range(max_refine + 1):
        nodes = scaled_nodes(basis, t_i, h)
        mids = scaled_midpoints(basis, t_i, h)
        w, w_mid = coeffs.omega(nodes), coeffs.omega(mids)
        delta = interpolation_error(basis, w, w_mid)
        if coeffs.has_gamma:
            g, g_mid = coeffs.gamma(nodes), coeffs.gamma(mids)
            delta = max(delta, interpolation_error(basis, g, g_mid))
        else:
            g = np.zeros_like(w)
        if delta <= eps_h:
            break
        h_new = min(0.7 * h, 0.9 * h * (eps_h / delta) ** (1.0 / (n + 1)))
        if h_new == h:
            break
        h = h_new
    return h, (w, g)


def refine_slo_h(basis, coeffs, t_i, h0, sigma=SIGMA, max_halvings=MAX_SLO_HALVINGS):
    """Halve ``h`` while ``min 1/omega`` over the midpoints is below ``sigma h``."""
    h = h0
    for _ in range(max_halvings + 1):
        w = coeffs.omega(scaled_midpoints(basis, t_i, h))
        if not np.min(1.0 / np.abs(w)) < sigma * h:
            return h
        h = 0.5 * h
    raise StepUnderflowError(f"spectral stepsize refinement did not settle at t={t_i}",
                             t=t_i, h_history=[h0, h])


def choose_step(h_osc, h_slo, omega_ti, factor=OSC_FACTOR, threshold=PHASE_THRESHOLD):
    """``"oscillatory"`` iff ``h_osc > factor h_slo`` and ``omega h_osc > threshold``."""
    if h_osc > factor * h_slo and omega_ti * h_osc > threshold:
        return "oscillatory"
    return "spectral"


def propose(coeffs, t_i, remaining, omega_ti, domega_ti, n_ricc, n_spec,
            eps_h=EPS_H, h_init=None, sigma=SIGMA, factor=OSC_FACTOR,
            threshold=PHASE_THRESHOLD):
    """Full proposal for the step starting at ``t_i``."""
    h_osc0, h_slo0 = initial_estimates(omega_ti, domega_ti, remaining, h_init)
    if not omega_ti > 0.0:
        return StepProposal(0.0, h_slo0, "spectral", omega_ti, domega_ti)
    h_slo = refine_slo_h(build_basis(n_spec), coeffs, t_i, h_slo0, sigma)
    # refinement never grows h, so a failed test here cannot pass later
    if choose_step(h_osc0, h_slo, omega_ti, factor, threshold) == "spectral":
        return StepProposal(h_osc0, h_slo, "spectral", omega_ti, domega_ti)
    h_osc, grid = refine_osc_h(build_basis(n_ricc), coeffs, t_i, h_osc0, eps_h)
    choice = choose_step(h_osc, h_slo, omega_ti, factor, threshold)
    return StepProposal(h_osc, h_slo, choice, omega_ti, domega_ti, grid)
