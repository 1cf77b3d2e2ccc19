"""Command-line front end.

Subcommands: ``solve``, ``benchmark``, ``residual-demo``, ``convergence``
and ``theorem-check``. Every command writes JSON or CSV to ``--out`` (or
standard output).
"""

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import analysis
from .errors import ARDCError, OracleRefusal
from .oracle import airy_ref, airy_solution, legendre_ref, rk_reference
from .problem import BuiltinProblem, InitialValueProblem, builtin_ivp, burst_coeffs, burst_m
from .solver import SolverOptions, dense_eval, solve

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2
FLOAT_FMT = "{:.16e}"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


# -- formatting ---------------------------------------------------------------

def _num(x):
    """JSON-safe scalar: NaN/inf become None, complex becomes ``[re, im]``."""
    if isinstance(x, (complex, np.complexfloating)):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, (np.integer, int)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT.format(float(x)) if math.isfinite(x) else "nan"
    if x is None:
        return ""
    return str(x)


def write_csv(header, rows, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


# -- problem selection --------------------------------------------------------

def _dense_spec(s):
    try:
        a, b, n = s.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a:b:count, got {s!r}") from exc
    if n < 1 or not a <= b:
        raise argparse.ArgumentTypeError(f"need a <= b and count >= 1, got {s!r}")
    return a, b, n


def _float_list(s):
    try:
        return [float(v) for v in s.split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from exc


def _first(v):
    return v[0] if isinstance(v, list) else v


def _builtin(name, args):
    if name == "airy":
        return BuiltinProblem.airy()
    if name == "bremer237":
        if args.lam is None:
            raise UsageError("--lambda is required for bremer237")
        return BuiltinProblem.bremer237(_first(args.lam))
    if name == "legendre":
        if args.nu is None:
            raise UsageError("--nu is required for legendre")
        nu = _first(args.nu)
        if nu != int(nu):
            raise UsageError("--nu must be an integer")
        return BuiltinProblem.legendre(int(nu))
    if name == "burst":
        if args.m is None:
            raise UsageError("--m is required for burst")
        return BuiltinProblem.burst(args.m)
    raise UsageError(f"unknown problem {name!r}")


def _initial_data(p, ivp, t0):
    """Initial data when the start time is moved away from the default."""
    if p.name == "airy":
        ai, bi, aip, bip = airy_ref(t0)
        return complex(ai, bi), complex(-aip, -bip)
    if p.name == "legendre":
        pv, dp = legendre_ref(ivp.params["nu"], t0)
        return complex(pv[0]), complex(dp[0])
    raise UsageError(f"--t0 cannot be changed for {p.name}")


def build_ivp(args):
    p = _builtin(args.problem, args)
    ivp = builtin_ivp(p)
    t0 = ivp.t0 if args.t0 is None else args.t0
    t1 = ivp.t1 if args.t1 is None else args.t1
    u0, du0 = ivp.u0, ivp.du0
    if t0 != ivp.t0:
        try:
            u0, du0 = _initial_data(p, ivp, t0)
        except OracleRefusal as exc:
            raise UsageError(str(exc)) from exc
    h_init = ivp.h_init if args.h_init is None else args.h_init
    ivp = InitialValueProblem(ivp.coeffs, t0, t1, u0, du0, h_init, ivp.name, ivp.params)
    return p, ivp


def build_options(args, dense_points=None):
    return SolverOptions(eps=args.eps, eps_h=args.eps_h, n_ricc=args.n_ricc,
                         n_spec=args.n_spec, dense_points=dense_points)


# -- reference errors ---------------------------------------------------------

def reference_values(ivp, t, rk_budget=2e5):
    """Reference ``u`` at times ``t`` for a built-in problem.

    Raises :class:`OracleRefusal` when no reference is affordable.
    """
    if ivp.name == "airy":
        return airy_solution(t)[0]
    if ivp.name == "legendre":
        return legendre_ref(ivp.params["nu"], t)[0].astype(complex)
    return rk_reference(ivp, abs_tol=3e-16, rel_tol=3e-14, t_eval=t, budget=rk_budget).u


def max_relative_error(ivp, report, rk_budget=2e5):
    """Largest ``|u - u_ref| / |u_ref|`` over the accepted step ends."""
    t = report.t_grid[1:]
    u = report.u[1:]
    ref = reference_values(ivp, t, rk_budget)
    mask = np.abs(ref) > 0
    return float(np.max(np.abs(u[mask] - ref[mask]) / np.abs(ref[mask])))


# -- report serialization -----------------------------------------------------

def step_dict(s):
    return {"kind": s.kind, "t_i": _num(s.t_i), "h": _num(s.h), "t_end": _num(s.t_end),
            "accepted": bool(s.accepted), "iterations_or_halvings": int(s.iterations_or_halvings),
            "n": int(s.n), "u_end": _num(complex(s.u_end)), "du_end": _num(complex(s.du_end)),
            "res_or_err": _num(s.res_or_err), "phase_im_increment": _num(s.phase_im_increment)}


def report_dict(ivp, opts, report):
    out = {
        "schema_version": SCHEMA_VERSION,
        "problem": {"name": ivp.name, "params": _jsonable(ivp.params), "t0": ivp.t0,
                    "t1": ivp.t1, "u0": _num(complex(ivp.u0)), "du0": _num(complex(ivp.du0)),
                    "h_init": ivp.h_init},
        "options": _jsonable(opts.to_dict()),
        "stats": report.stats.to_dict(),
        "steps": [step_dict(s) for s in report.steps],
        "kappa": _num(report.kappa),
        "eps_floor": _num(report.eps_floor),
    }
    if report.dense is not None:
        tq = report.dense[0]
        u, du = dense_eval(report, tq)
        out["dense"] = {"t": [_num(v) for v in tq], "u": [_num(v) for v in u],
                        "du": [_num(v) for v in du]}
    return out


def _jsonable(d):
    return {k: _num(v) for k, v in d.items()}


DENSE_HEADER = ["t", "re_u", "im_u", "re_du", "im_du"]
STEP_HEADER = ["kind", "t_i", "h", "t_end", "accepted", "iterations_or_halvings", "n",
               "re_u_end", "im_u_end", "re_du_end", "im_du_end", "res_or_err",
               "phase_im_increment"]


def _step_row(s):
    u, du = complex(s.u_end), complex(s.du_end)
    return [s.kind, s.t_i, s.h, s.t_end, s.accepted, s.iterations_or_halvings, s.n,
            u.real, u.imag, du.real, du.imag, s.res_or_err, s.phase_im_increment]


# -- commands -----------------------------------------------------------------

def cmd_solve(args):
    p, ivp = build_ivp(args)
    dense = None
    if args.dense is not None:
        a, b, n = args.dense
        dense = np.linspace(a, b, n)
        if a < ivp.t0 or b > ivp.t1:
            raise UsageError(f"--dense range must lie inside [{ivp.t0}, {ivp.t1}]")
    opts = build_options(args, dense)
    try:
        report = solve(ivp, opts)
    except ARDCError as exc:
        diag = {"schema_version": SCHEMA_VERSION, "error": type(exc).__name__,
                "message": str(exc), "t": _num(getattr(exc, "t", None)),
                "h_history": [_num(h) for h in getattr(exc, "h_history", [])]}
        _emit(_dumps(diag), args.out)
        return EXIT_SOLVER
    if args.format == "json":
        _emit(_dumps(report_dict(ivp, opts, report)), args.out)
    else:
        buf = io.StringIO()
        if dense is not None:
            u, du = dense_eval(report, dense)
            rows = [[t, a.real, a.imag, b.real, b.imag] for t, a, b in zip(dense, u, du)]
            write_csv(DENSE_HEADER, rows, buf)
        else:
            write_csv(STEP_HEADER, [_step_row(s) for s in report.steps], buf)
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


BENCH_HEADER = ["problem", "param", "max_rel_err", "err_is_floor_bound", "t_solve",
                "n_s_osc_att", "n_s_osc_acc", "n_s_slo_att", "n_s_slo_acc",
                "n_s_tot_att", "n_s_tot_acc", "n_f", "n_LS", "kappa", "eps_floor"]
DEFAULT_SWEEPS = {"bremer237": [10.0 ** k for k in range(1, 8)],
                  "legendre": [10.0 ** k for k in range(1, 6)],
                  "airy": [None], "burst": [None]}


def _time_solve(ivp, opts, reps):
    solve(ivp, opts)  # warm-up, discarded
    times = []
    for _ in range(max(1, reps)):
        t = time.perf_counter()
        solve(ivp, opts)
        times.append(time.perf_counter() - t)
    return float(np.median(times))


def cmd_benchmark(args):
    name = args.problem
    if name == "bremer237":
        params = args.lam or DEFAULT_SWEEPS[name]
    elif name == "legendre":
        params = args.nu or DEFAULT_SWEEPS[name]
    elif name == "burst":
        params = [args.m] if args.m is not None else [burst_m(1e3)]
    else:
        params = [None]
    rows = []
    for v in params:
        sub = argparse.Namespace(**vars(args))
        sub.lam, sub.nu, sub.m = ([v], None, None) if name == "bremer237" else \
            (None, [v], None) if name == "legendre" else (None, None, v)
        _, ivp = build_ivp(sub)
        opts = build_options(args)
        report = solve(ivp, opts)
        try:
            err, is_floor = max_relative_error(ivp, report, args.rk_budget), False
        except OracleRefusal:
            err, is_floor = max(10.0 * report.eps_floor, args.eps), True
        t_solve = _time_solve(ivp, opts, args.reps) if args.reps > 0 else math.nan
        st = report.stats
        rows.append([name, v if v is not None else math.nan, err, is_floor, t_solve,
                     *st.n_s_osc, *st.n_s_slo, *st.n_s_tot, st.n_f, st.n_LS,
                     report.kappa, report.eps_floor])
    _write_table(args, BENCH_HEADER, rows)
    return EXIT_OK


def _write_table(args, header, rows):
    if args.format == "csv":
        buf = io.StringIO()
        write_csv(header, rows, buf)
        _emit(buf.getvalue(), args.out)
    else:
        data = {"schema_version": SCHEMA_VERSION, "columns": header,
                "rows": [[_num(v) for v in r] for r in rows]}
        _emit(_dumps(data), args.out)


RESIDUAL_HEADER = ["series", "omega_max", "omega_const", "j", "res_norm"]


def cmd_residual_demo(args):
    omegas = args.omega_max or [10.0, 1e2, 1e3, 1e4]
    interval = (0.0, 0.5)
    data = analysis.residual_decay_experiment(omegas, args.n_ricc, interval, args.j_max)
    rows = []
    for wm, norms in data.items():
        rows += [["burst", wm, math.nan, j, r] for j, r in enumerate(norms)]
    w_model = analysis.burst_min_omega(min(omegas), interval)
    model = analysis.roundoff_model_experiment(w_model, args.n_ricc, interval, args.j_max)
    rows += [["constant", min(omegas), w_model, j, r] for j, r in enumerate(model)]
    _write_table(args, RESIDUAL_HEADER, rows)
    return EXIT_OK


CONV_HEADER = ["t1", "eps", "achieved", "floor", "bound", "within", "n_s_tot_acc"]
CONV_EPS = [10.0 ** -k for k in range(3, 14)]
CONV_T1 = [1e2, 1e4, 1e6, 1e8]


def convergence_rows(eps_list=CONV_EPS, t1_list=CONV_T1, eps_h=1e-13, n_ricc=16, n_spec=16):
    """Achieved against requested error for Airy, with the kappa floor."""
    rows = []
    base = builtin_ivp(BuiltinProblem.airy())
    for t1 in t1_list:
        ivp = InitialValueProblem(base.coeffs, base.t0, t1, base.u0, base.du0, base.h_init,
                                  base.name)
        for eps in eps_list:
            report = solve(ivp, SolverOptions(eps=eps, eps_h=eps_h, n_ricc=n_ricc,
                                              n_spec=n_spec))
            achieved = max_relative_error(ivp, report)
            floor = report.eps_floor
            bound = 10.0 * max(eps, floor)
            rows.append([t1, eps, achieved, floor, bound, bool(achieved <= bound),
                         report.stats.n_s_tot[1]])
    return rows


def cmd_convergence(args):
    eps_list = args.eps_list or CONV_EPS
    t1_list = [args.t1] if args.t1 is not None else CONV_T1
    rows = convergence_rows(eps_list, t1_list, args.eps_h, args.n_ricc, args.n_spec)
    _write_table(args, CONV_HEADER, rows)
    return EXIT_OK


THM_HEADER = ["t_center", "rho", "j", "r", "bound", "observed", "holds"]


def cmd_theorem_check(args):
    if args.problem != "burst":
        raise UsageError("theorem-check supports --problem burst")
    m = args.m if args.m is not None else burst_m(1e3)
    coeffs = burst_coeffs(m)
    bounds = analysis.compute_ball_bounds(coeffs, args.t_center, args.rho)
    tc = analysis.check_theorem(bounds, coeffs)
    if not tc.applicable:
        sys.stderr.write(f"theorem not applicable: {tc.reason}\n")
    rows = [[args.t_center, args.rho, j, r, b, o if o is not None else math.nan, h]
            for j, r, b, o, h in tc.rows()]
    _write_table(args, THM_HEADER, rows)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

def _common(p, problem_required=True, default_problem=None):
    p.add_argument("--problem", choices=["airy", "bremer237", "legendre", "burst"],
                   required=problem_required and default_problem is None,
                   default=default_problem)
    p.add_argument("--lambda", dest="lam", type=_float_list, default=None)
    p.add_argument("--nu", type=_float_list, default=None)
    p.add_argument("--m", type=float, default=None)
    p.add_argument("--eps", type=float, default=1e-12)
    p.add_argument("--eps-h", type=float, default=1e-13)
    p.add_argument("--n-ricc", type=int, default=16)
    p.add_argument("--n-spec", type=int, default=16)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--t1", type=float, default=None)
    p.add_argument("--h-init", type=float, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)


def make_parser():
    parser = _Parser(prog="ardc", description="Adaptive Riccati defect-correction solver.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a built-in problem")
    _common(p)
    p.add_argument("--dense", type=_dense_spec, default=None, metavar="a:b:count")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("benchmark", help="accuracy, timing and cost over a parameter sweep")
    _common(p, default_problem="bremer237")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--rk-budget", type=float, default=2e5)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("residual-demo", help="residual against sweep index on Burst")
    _common(p, default_problem="burst")
    p.add_argument("--omega-max", type=_float_list, default=None)
    p.add_argument("--j-max", type=int, default=12)
    p.set_defaults(func=cmd_residual_demo)

    p = sub.add_parser("convergence", help="achieved against requested error on Airy")
    _common(p, default_problem="airy")
    p.add_argument("--eps-list", type=_float_list, default=None)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("theorem-check", help="residual bound check on a complex ball")
    _common(p, default_problem="burst")
    p.add_argument("--t-center", type=float, default=0.25)
    p.add_argument("--rho", type=float, default=0.2)
    p.set_defaults(func=cmd_theorem_check)
    return parser


def validate(args):
    if not 0.0 < args.eps < 1.0:
        raise UsageError("--eps must lie in (0, 1)")
    if not args.eps_h > 0.0:
        raise UsageError("--eps-h must be positive")
    for flag, v in (("--n-ricc", args.n_ricc), ("--n-spec", args.n_spec)):
        if not 4 <= v <= 64:
            raise UsageError(f"{flag} must lie in [4, 64]")
    if args.h_init is not None and not args.h_init > 0:
        raise UsageError("--h-init must be positive")
    if getattr(args, "reps", 0) < 0:
        raise UsageError("--reps must be non-negative")


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        validate(args)
        return args.func(args)
    except (UsageError, ARDCError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"ardc: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
