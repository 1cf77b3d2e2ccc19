"""Top-level driver alternating oscillatory and spectral steps."""

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import controller
from .chebyshev import (antiderivative_eval, barycentric_eval, build_basis, scaled_nodes,
                        scaled_quad_weights)
from .errors import (DegenerateDenominatorError, DegenerateMatchingError,
                     InvalidParameterError, OutOfRangeError)
from .problem import CountingCoefficients, eval_coeffs_on_grid
from .riccati_step import combine, riccati_step
from .spectral_step import spectral_step

EPS_MACH = float(np.finfo(float).eps)


@dataclass
class SolverOptions:
    eps: float = 1e-12
    eps_h: float = controller.EPS_H
    n_ricc: int = 16
    n_spec: int = 16
    dense_points: Optional[np.ndarray] = None
    endpoint_only: bool = False
    n_max: int = 64
    j_max: int = 32
    sigma: float = controller.SIGMA
    osc_factor: float = controller.OSC_FACTOR
    phase_threshold: float = controller.PHASE_THRESHOLD
    h_min_rel: float = 1e-14

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise InvalidParameterError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.eps_h > 0.0:
            raise InvalidParameterError("eps_h must be positive")
        for name in ("n_ricc", "n_spec"):
            v = getattr(self, name)
            if int(v) != v or not 4 <= v <= 64:
                raise InvalidParameterError(f"{name} must be an integer in [4, 64], got {v}")
        if self.endpoint_only and self.dense_points is not None:
            raise InvalidParameterError("dense output needs node phase values; drop endpoint_only")

    def to_dict(self):
        d = asdict(self)
        if self.dense_points is not None:
            d["dense_points"] = len(self.dense_points)
        return d


@dataclass
class StepRecord:
    kind: str
    t_i: float
    h: float
    accepted: bool
    iterations_or_halvings: int
    u_end: complex
    du_end: complex
    res_or_err: float
    phase_im_increment: float = 0.0
    t_end: float = math.nan
    n: int = 0
    # interpolation data for dense output; None for rejected attempts
    dense: Optional[dict] = field(default=None, repr=False)
    kappa_local: float = 0.0


@dataclass
class Stats:
    n_s_osc: tuple = (0, 0)
    n_s_slo: tuple = (0, 0)
    n_f: int = 0
    n_LS: int = 0

    @property
    def n_s_tot(self):
        return (self.n_s_osc[0] + self.n_s_slo[0], self.n_s_osc[1] + self.n_s_slo[1])

    def to_dict(self):
        return {"n_s_osc": list(self.n_s_osc), "n_s_slo": list(self.n_s_slo),
                "n_s_tot": list(self.n_s_tot), "n_f": self.n_f, "n_LS": self.n_LS}


@dataclass
class SolveReport:
    t0: float
    t1: float
    u0: complex
    du0: complex
    steps: list
    stats: Stats
    kappa: float = 0.0
    eps_floor: float = 0.0
    dense: Optional[tuple] = None
    # coefficient evaluators, used by dense output to correct the phase
    coeffs: Optional[object] = field(default=None, repr=False)

    @property
    def accepted_steps(self):
        return [s for s in self.steps if s.accepted]

    @property
    def t_grid(self):
        return np.array([self.t0] + [s.t_end for s in self.accepted_steps])

    @property
    def u(self):
        return np.array([self.u0] + [s.u_end for s in self.accepted_steps])

    @property
    def du(self):
        return np.array([self.du0] + [s.du_end for s in self.accepted_steps])


def _bump(pair, accepted):
    return (pair[0] + 1, pair[1] + int(accepted))


def _start_grid(cc, basis, t0, h):
    w = cc.omega(scaled_nodes(basis, t0, h))
    return controller.derivative_at_start(basis, h, w)


def _land(h, remaining, h_min):
    # never leave a sliver shorter than h_min before t1
    return remaining if remaining - h <= h_min else h


def solve(ivp, opts=None):
    """Integrate ``ivp`` from ``t0`` to ``t1``.

    Parameters
    ----------
    ivp : InitialValueProblem
    opts : SolverOptions, optional

    Returns
    -------
    SolveReport
    """
    opts = opts or SolverOptions()
    cc = CountingCoefficients(ivp.coeffs)
    stats = Stats()
    steps = []
    t, t1 = float(ivp.t0), float(ivp.t1)
    u, du = complex(ivp.u0), complex(ivp.du0)
    h_min = (t1 - t) * opts.h_min_rel
    basis_r = build_basis(opts.n_ricc)

    # omega'(t0) from a throwaway grid of width h_init
    w_ti, dw_ti = _start_grid(cc, basis_r, t, min(ivp.h_init, t1 - t))

    while t < t1:
        remaining = t1 - t
        prop = controller.propose(cc, t, remaining, w_ti, dw_ti, opts.n_ricc, opts.n_spec,
                                  opts.eps_h, ivp.h_init, opts.sigma, opts.osc_factor,
                                  opts.phase_threshold)
        rec = None
        if prop.choice == "oscillatory":
            h = _land(prop.h_osc, remaining, h_min)
            t_end = t1 if h >= remaining else t + h
            # the step fills its own coefficient vectors; refinement probes are separate
            w, g = eval_coeffs_on_grid(cc, scaled_nodes(basis_r, t, h))
            try:
                res, it = riccati_step(basis_r, t, h, w, g, u, du, opts.eps,
                                       endpoint_only=opts.endpoint_only, j_max=opts.j_max)
            except (DegenerateDenominatorError, DegenerateMatchingError):
                res, it = None, None
            stats.n_s_osc = _bump(stats.n_s_osc, res is not None)
            if res is not None:
                dense = {"kind": "osc", "basis": basis_r, "z": res.z_plus, "x": res.x_plus,
                         "w": w, "g": g if cc.has_gamma else None,
                         "A_plus": res.A_plus, "A_minus": res.A_minus}
                rec = StepRecord("oscillatory", t, h, True, res.iterations, res.u_end,
                                 res.du_end, res.res_norm_final,
                                 float(res.phase_increment.imag), t_end, basis_r.n, dense,
                                 abs(t_end * res.x_plus[0]))
                w_ti, dw_ti = controller.derivative_at_end(basis_r, h, w)
            else:
                steps.append(StepRecord(
                    "oscillatory", t, h, False, it.j if it is not None else 0, math.nan,
                    math.nan, it.res_norm if it is not None else math.inf, 0.0, t_end,
                    basis_r.n))
        if rec is None:
            h = _land(min(prop.h_slo, remaining), remaining, h_min)
            res = spectral_step(t, h, cc, u, du, opts.eps, opts.n_spec, opts.n_max, h_min)
            stats.n_LS += res.n_ls
            for k in range(res.halvings):
                hk = h * 0.5 ** k
                steps.append(StepRecord("spectral", t, hk, False, k, math.nan, math.nan,
                                        math.nan, 0.0, t + hk, opts.n_max))
            stats.n_s_slo = (stats.n_s_slo[0] + res.halvings + 1, stats.n_s_slo[1] + 1)
            h = res.h
            t_end = t1 if h >= remaining else t + h
            basis_s = build_basis(res.n_used)
            phase = float(scaled_quad_weights(basis_s, h) @ np.abs(res.omega))
            dense = {"kind": "slo", "basis": basis_s, "u": res.u_nodes, "du": res.du_nodes}
            nodes = scaled_nodes(basis_s, t, h)
            rec = StepRecord("spectral", t, h, True, res.halvings, res.u_end, res.du_end,
                             res.rel_err_est, phase, t_end, res.n_used, dense,
                             float(np.max(np.abs(nodes * res.omega))))
            w_ti, dw_ti = controller.derivative_at_end(basis_s, h, res.omega)
        steps.append(rec)
        u, du = rec.u_end, rec.du_end
        t = t_end

    report = SolveReport(ivp.t0, ivp.t1, complex(ivp.u0), complex(ivp.du0), steps, stats,
                         coeffs=cc)
    report.kappa = condition_estimate(report)
    report.eps_floor = report.kappa * EPS_MACH
    if opts.dense_points is not None:
        # dense evaluations made here count towards n_f; later ones do not
        tq = np.asarray(opts.dense_points, dtype=float)
        report.dense = (tq, dense_eval(report, tq)[0])
    stats.n_f = cc.n_f
    report.coeffs = ivp.coeffs
    return report


def kappa_profile(report):
    """Running condition estimate at the end of every accepted step."""
    out = []
    acc_phase = 0.0
    k = 0.0
    for s in report.accepted_steps:
        acc_phase += abs(s.phase_im_increment)
        k = max(k, s.kappa_local, acc_phase)
        out.append(k)
    return np.array(out)


def condition_estimate(report):
    """``kappa = max(|t z'(t)|, accrued |Im z|)`` over the solve."""
    prof = kappa_profile(report)
    return float(prof[-1]) if prof.size else 0.0


def _phase_correction(coeffs, d, t_i, h, tq):
    """Corrections to ``z_+`` and ``x_+`` at ``tq`` from the coefficients' own
    interpolation error.

    Between nodes the phase inherits the interpolation error of ``omega``
    (relative size ``eps_h``), and integrating it over a long step leaves an
    error proportional to the step's phase. Since ``x_+ ~ i omega - gamma``,
    replacing the interpolants of ``omega`` and ``gamma`` with the
    coefficients themselves removes the leading part. The integrals over
    ``[t_i, tq]`` use a fresh Clenshaw-Curtis grid, so the cost per query is
    independent of frequency.
    """
    basis = d["basis"]
    tq = np.asarray(tq, dtype=float)
    dz = np.empty(tq.shape, dtype=complex)
    for q, t in enumerate(tq):
        hq = t - t_i
        nodes = scaled_nodes(basis, t_i, hq)
        wq = scaled_quad_weights(basis, hq)
        dz[q] = 1j * (wq @ coeffs.omega(nodes))
        if d["g"] is not None:
            dz[q] -= wq @ coeffs.gamma(nodes)
    dz -= 1j * antiderivative_eval(basis, d["w"], t_i, h, tq)
    dx = 1j * (coeffs.omega(tq) - barycentric_eval(basis, d["w"], t_i, h, tq))
    if d["g"] is not None:
        dz += antiderivative_eval(basis, d["g"], t_i, h, tq)
        dx -= coeffs.gamma(tq) - barycentric_eval(basis, d["g"], t_i, h, tq)
    return dz, dx


def _eval_step(s, tq, coeffs=None):
    d = s.dense
    if d is None:
        raise OutOfRangeError("step carries no dense-output data")
    h = s.t_end - s.t_i
    if d["kind"] == "osc":
        if d["z"] is None:
            raise OutOfRangeError("dense output unavailable for endpoint-only steps")
        # z is the degree n+1 antiderivative of the x interpolant; evaluating it
        # exactly avoids a truncation error proportional to the step's phase
        z = antiderivative_eval(d["basis"], d["x"], s.t_i, h, tq)
        x = barycentric_eval(d["basis"], d["x"], s.t_i, h, tq)
        if coeffs is not None:
            dz, dx = _phase_correction(coeffs, d, s.t_i, h, tq)
            z, x = z + dz, x + dx
        return combine(d["A_plus"], d["A_minus"], z, x)
    return (barycentric_eval(d["basis"], d["u"], s.t_i, h, tq),
            barycentric_eval(d["basis"], d["du"], s.t_i, h, tq))


def dense_eval(report, t_query):
    """Solution and derivative at arbitrary times inside ``[t0, t1]``.

    Step endpoints return the stored endpoint values.
    """
    tq = np.atleast_1d(np.asarray(t_query, dtype=float))
    if np.any(tq < report.t0) or np.any(tq > report.t1):
        raise OutOfRangeError(f"query outside [{report.t0}, {report.t1}]")
    acc = report.accepted_steps
    ends = np.array([s.t_end for s in acc])
    coeffs = report.coeffs
    if coeffs is not None and not isinstance(coeffs, CountingCoefficients):
        coeffs = CountingCoefficients(coeffs)
    u = np.empty(tq.shape, dtype=complex)
    du = np.empty(tq.shape, dtype=complex)
    idx = np.searchsorted(ends, tq, side="left")
    for q, (t, i) in enumerate(zip(tq, idx)):
        if t == report.t0:
            u[q], du[q] = report.u0, report.du0
        elif t == ends[i]:
            u[q], du[q] = acc[i].u_end, acc[i].du_end
        else:
            uu, dd = _eval_step(acc[i], np.array([t]), coeffs)
            u[q], du[q] = uu[0], dd[0]
    if np.ndim(t_query) == 0:
        return u[0], du[0]
    return u, du
