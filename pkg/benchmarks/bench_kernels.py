"""Time the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--reps N]``. Both backends
are imported directly, so ``ARDC_PURE_PYTHON`` has no effect here.
"""

import argparse
import timeit

import numpy as np

from ardc._kernels import backends
from ardc.chebyshev import build_basis, scaled_diff, scaled_nodes
from ardc.problem import burst_coeffs, burst_m


def _defect_case(n, omega_max):
    basis = build_basis(n)
    h = 0.5
    w = burst_coeffs(burst_m(omega_max)).omega(scaled_nodes(basis, 0.0, h))
    return scaled_diff(basis, h), w, np.zeros_like(w)


def _bary_case(n, n_query):
    basis = build_basis(n)
    vals = np.exp(1j * 3.0 * basis.std_nodes)
    q = np.linspace(-0.999, 0.999, n_query)
    return basis.std_nodes, basis.bary_weights, vals, q


def run(reps=2000):
    found = backends()
    reps = max(1, reps)
    rows = []
    for n in (16, 40, 64):
        D, w, g = _defect_case(n, 1e3)
        for name, mod in found.items():
            t = min(timeit.repeat(lambda: mod.defect_loop(D, w, g, 1e-12, 32, True),
                                  number=reps, repeat=3)) / reps
            rows.append(("defect_loop", n, name, t))
        args = _bary_case(n, 1000)
        nb = max(1, reps // 10)
        for name, mod in found.items():
            t = min(timeit.repeat(lambda: mod.barycentric(*args), number=nb,
                                  repeat=3)) / nb
            rows.append(("barycentric", n, name, t))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=2000)
    args = ap.parse_args()
    rows = run(args.reps)
    base = {(k, n): t for k, n, name, t in rows if name == "python"}
    print(f"{'kernel':<12} {'n':>3} {'backend':<9} {'time [us]':>10} {'speedup':>8}")
    for k, n, name, t in rows:
        print(f"{k:<12} {n:>3} {name:<9} {t * 1e6:>10.2f} {base[(k, n)] / t:>8.2f}")


if __name__ == "__main__":
    main()
