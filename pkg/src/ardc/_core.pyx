# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in :mod:`ardc._kernels_py`.

Signatures and return conventions match the pure-Python module exactly.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmax

cdef extern from "complex.h" nogil:
    double cabs(double complex)

cnp.import_array()

cdef enum:
    CONVERGED = 0
    STALLED = 1
    ITER_CAP = 2
    DEGENERATE = 3


cdef void _matvec(const double[:, ::1] D, const double complex[::1] v,
                  double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t m = D.shape[0]
    cdef Py_ssize_t i, k
    cdef double re, im
    for i in range(m):
        re = 0.0
        im = 0.0
        for k in range(m):
            re += D[i, k] * v[k].real
            im += D[i, k] * v[k].imag
        out[i] = re + 1j * im


cdef double _maxabs(const double complex[::1] v) noexcept nogil:
    cdef Py_ssize_t i
    cdef double m = 0.0
    for i in range(v.shape[0]):
        m = fmax(m, cabs(v[i]))
    return m


def defect_loop(D, omega, gamma, double eps, int j_max, bint stop=True,
                bint diff_form=True):
    cdef const double[:, ::1] Dv = np.ascontiguousarray(D, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t i
    cdef int j
    cdef double norm, norm_new, re
    cdef double complex s

    x_arr = np.empty(m, dtype=np.complex128)
    R_arr = np.empty(m, dtype=np.complex128)
    xn_arr = np.empty(m, dtype=np.complex128)
    Rn_arr = np.empty(m, dtype=np.complex128)
    d_arr = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] x = x_arr
    cdef double complex[::1] R = R_arr
    cdef double complex[::1] xn = xn_arr
    cdef double complex[::1] Rn = Rn_arr
    cdef double complex[::1] d = d_arr

    for i in range(m):
        x[i] = 1j * w[i]
        re = 0.0
        if diff_form:
            for j in range(m):
                re += Dv[i, j] * (w[j] - w[i])
        else:
            for j in range(m):
                re += Dv[i, j] * w[j]
        R[i] = 1j * (re + 2.0 * g[i] * w[i])
    norm = _maxabs(R)
    norms = [norm]
    if stop and norm == 0.0:
        return x_arr, R_arr, norms, CONVERGED, 0

    for j in range(j_max):
        for i in range(m):
            s = x[i] + g[i]
            if cabs(s) < 1e-14 * fmax(1.0, fabs(w[i])):
                return x_arr.copy(), R_arr.copy(), norms, DEGENERATE, j
            d[i] = -R[i] / (2.0 * s)
            xn[i] = x[i] + d[i]
        _matvec(Dv, d, Rn)
        for i in range(m):
            Rn[i] = Rn[i] + d[i] * d[i]
        norm_new = _maxabs(Rn)
        norms.append(norm_new)
        if stop and not norm_new < norm:
            return x_arr.copy(), R_arr.copy(), norms, (CONVERGED if norm < eps else STALLED), j
        x[:] = xn
        R[:] = Rn
        norm = norm_new
        if stop and norm < eps:
            return x_arr.copy(), R_arr.copy(), norms, CONVERGED, j + 1
    return x_arr.copy(), R_arr.copy(), norms, ITER_CAP, j_max


def barycentric(nodes, weights, values, queries):
    cdef const double[::1] xs = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] ws = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double complex[::1] fs = np.ascontiguousarray(values, dtype=np.complex128)
    cdef const double[::1] qs = np.ascontiguousarray(
        np.atleast_1d(np.asarray(queries, dtype=np.float64)))
    cdef Py_ssize_t nq = qs.shape[0]
    cdef Py_ssize_t m = xs.shape[0]
    cdef Py_ssize_t q, k
    cdef double diff, c, den
    cdef double complex num
    cdef bint hit
    out_arr = np.empty(nq, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    with nogil:
        for q in range(nq):
            hit = False
            num = 0.0
            den = 0.0
            for k in range(m):
                diff = qs[q] - xs[k]
                if diff == 0.0:
                    out[q] = fs[k]
                    hit = True
                    break
                c = ws[k] / diff
                num = num + c * fs[k]
                den = den + c
            if not hit:
                out[q] = num / den
    return out_arr
