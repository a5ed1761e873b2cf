# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled lane of the stepping kernel.

Mirrors ``_fallback.py`` exactly: Dormand-Prince 5(4) with FSAL, RMS
error norm, identical controller constants.  The three vector-field
kinds are dispatched on an integer tag; see ``terms.py`` for the data
layout produced by ``lower()``.
"""

import numpy as np

from ..errors import IntegrationError

cimport cython
from libc.math cimport isfinite, pow, sqrt

ctypedef double complex cplx

cdef extern from "complex.h" nogil:
    cplx cexp(cplx)
    double cabs(cplx)

cdef double *C_NODES = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0]

# A tableau flattened row-major, 6 entries per stage row
cdef double *A_TAB = [
    0, 0, 0, 0, 0, 0,
    1.0 / 5, 0, 0, 0, 0, 0,
    3.0 / 40, 9.0 / 40, 0, 0, 0, 0,
    44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0,
    19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0,
    9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0,
    35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84,
]

cdef double *B5 = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                   -2187.0 / 6784, 11.0 / 84, 0.0]

cdef double *ERRC = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                     -17253.0 / 339200, 22.0 / 525, -1.0 / 40]


cdef inline cplx ipow(cplx z, long p) noexcept nogil:
    cdef cplx out = 1.0
    cdef cplx base = z if p >= 0 else 1.0 / z
    cdef long q = p if p >= 0 else -p
    while q > 0:
        out = out * base
        q -= 1
    return out


cdef void path_eval(int path_kind, int r, cplx[::1] pd, double t,
                    cplx *g, cplx *dg) noexcept nogil:
    cdef int j
    cdef cplx ph, a0, da
    if path_kind == 0:  # line
        for j in range(r):
            g[j] = pd[j] + pd[r + j] * t
            dg[j] = pd[r + j]
    else:  # arc
        a0 = pd[2 * r]
        da = pd[2 * r + 1]
        ph = cexp(1j * (a0 + da * t))
        for j in range(r):
            g[j] = pd[j] + pd[r + j] * ph
            dg[j] = pd[r + j] * ph * 1j * da


cdef void rhs(int kind, int path_kind, int r, cplx[::1] pd,
              cplx[:, :, ::1] mats, long[::1] powers,
              cplx[:, :, ::1] aux, cplx[:, ::1] root_rows, cplx scale,
              double t, cplx[:, ::1] y, cplx[:, ::1] out,
              cplx[:, ::1] work, cplx *gbuf) noexcept nogil:
    cdef int n = y.shape[0]
    cdef int i, j, kk, a, nm
    cdef cplx z, dz, s, acc, b
    cdef cplx *g = gbuf
    cdef cplx *dg = gbuf + r
    path_eval(path_kind, r, pd, t, g, dg)

    for i in range(n):
        for j in range(n):
            work[i, j] = 0
    nm = mats.shape[0]
    if kind == 0:
        z = g[0]
        dz = dg[0]
        for a in range(nm):
            s = dz * ipow(z, powers[a])
            for i in range(n):
                for j in range(n):
                    work[i, j] = work[i, j] + s * mats[a, i, j]
    elif kind == 1:
        for a in range(nm):
            acc = 0
            b = 0
            for j in range(r):
                acc = acc + root_rows[a, j] * dg[j]
                b = b + root_rows[a, j] * g[j]
            s = scale * acc / b
            for i in range(n):
                for j in range(n):
                    work[i, j] = work[i, j] + s * mats[a, i, j]
    else:
        for a in range(nm):
            acc = 0
            b = 0
            for j in range(r):
                acc = acc + root_rows[a, j] * dg[j]
                b = b + root_rows[a, j] * g[j]
            s = acc / b
            acc = 0
            for i in range(n):
                for j in range(n):
                    acc = acc + mats[a, i, j] * y[i, j]
            s = s * acc
            for i in range(n):
                for j in range(n):
                    work[i, j] = work[i, j] + s * aux[a, i, j]

    if kind == 2:
        for i in range(n):
            for j in range(n):
                acc = 0
                for kk in range(n):
                    acc = acc + y[i, kk] * work[kk, j] - work[i, kk] * y[kk, j]
                out[i, j] = acc
    else:
        for i in range(n):
            for j in range(n):
                acc = 0
                for kk in range(n):
                    acc = acc + work[i, kk] * y[kk, j]
                out[i, j] = acc


def propagate(int kind, int path_kind, cplx[::1] path_data,
              cplx[:, :, ::1] mats, long[::1] powers, cplx[:, :, ::1] aux,
              cplx[:, ::1] root_rows, cplx scale,
              y0, double rtol, double atol, long max_steps, trace=None):
    """Compiled twin of ``_fallback.propagate`` (lowered-term signature)."""
    cdef int r = root_rows.shape[1] if kind != 0 else 1
    y_arr = np.array(y0, dtype=complex)
    cdef int n = y_arr.shape[0]
    cdef cplx[:, ::1] y = y_arr
    karr = np.zeros((7, n, n), dtype=complex)
    cdef cplx[:, :, ::1] k = karr
    ys_arr = np.zeros((n, n), dtype=complex)
    y1_arr = np.zeros((n, n), dtype=complex)
    err_arr = np.zeros((n, n), dtype=complex)
    work_arr = np.zeros((n, n), dtype=complex)
    gbuf_arr = np.zeros(2 * r + 2, dtype=complex)
    cdef cplx[:, ::1] ys = ys_arr
    cdef cplx[:, ::1] y1 = y1_arr
    cdef cplx[:, ::1] err = err_arr
    cdef cplx[:, ::1] work = work_arr
    cdef cplx[::1] gbuf = gbuf_arr

    cdef double t = 0.0, h, d0 = 0.0, d1 = 0.0, sc, enorm, factor, q
    cdef long n_accept = 0, n_reject = 0
    cdef int i, j, stage, jj
    cdef double a_coef

    rhs(kind, path_kind, r, path_data, mats, powers, aux, root_rows, scale,
        0.0, y, k[0], work, &gbuf[0])

    for i in range(n):
        for j in range(n):
            sc = atol + rtol * cabs(y[i, j])
            d0 += (cabs(y[i, j]) / sc) ** 2
            d1 += (cabs(k[0, i, j]) / sc) ** 2
    d0 = sqrt(d0 / (n * n))
    d1 = sqrt(d1 / (n * n))
    if d1 > 1e-16 * (d0 if d0 > 1.0 else 1.0):
        h = 0.01 * d0 / d1
    else:
        h = 1e-3
    if h > 1.0:
        h = 1.0

    if trace is not None:
        trace.append((0.0, y_arr.copy()))

    cdef bint final
    while t < 1.0:
        final = h >= 1.0 - t
        if h > 1.0 - t:
            h = 1.0 - t
        if h < 1e-15:
            raise IntegrationError(f"step size underflow at t={t}")
        for stage in range(1, 7):
            for i in range(n):
                for j in range(n):
                    ys[i, j] = y[i, j]
            for jj in range(stage):
                a_coef = A_TAB[6 * stage + jj]
                if a_coef != 0.0:
                    for i in range(n):
                        for j in range(n):
                            ys[i, j] = ys[i, j] + h * a_coef * k[jj, i, j]
            rhs(kind, path_kind, r, path_data, mats, powers, aux, root_rows,
                scale, t + C_NODES[stage] * h, ys, k[stage], work, &gbuf[0])
        for i in range(n):
            for j in range(n):
                y1[i, j] = y[i, j]
                err[i, j] = 0
        for jj in range(7):
            if B5[jj] != 0.0:
                for i in range(n):
                    for j in range(n):
                        y1[i, j] = y1[i, j] + h * B5[jj] * k[jj, i, j]
            if ERRC[jj] != 0.0:
                for i in range(n):
                    for j in range(n):
                        err[i, j] = err[i, j] + h * ERRC[jj] * k[jj, i, j]
        enorm = 0.0
        for i in range(n):
            for j in range(n):
                sc = cabs(y[i, j])
                q = cabs(y1[i, j])
                if q > sc:
                    sc = q
                sc = atol + rtol * sc
                enorm += (cabs(err[i, j]) / sc) ** 2
        enorm = sqrt(enorm / (n * n))
        if not isfinite(enorm):
            n_reject += 1
            factor = 0.2
        elif enorm <= 1.0:
            t = 1.0 if final else t + h
            for i in range(n):
                for j in range(n):
                    y[i, j] = y1[i, j]
                    k[0, i, j] = k[6, i, j]
            n_accept += 1
            if trace is not None:
                trace.append((t, y_arr.copy()))
            if enorm == 0.0:
                factor = 10.0
            else:
                factor = 0.9 * pow(enorm, -0.2)
                if factor > 10.0:
                    factor = 10.0
                if factor < 0.2:
                    factor = 0.2
        else:
            n_reject += 1
            factor = 0.9 * pow(enorm, -0.2)
            if factor > 0.9:
                factor = 0.9
            if factor < 0.2:
                factor = 0.2
        h *= factor
        if n_accept + n_reject > max_steps:
            raise IntegrationError(f"step budget {max_steps} exhausted at t={t}")
    return y_arr, {"n_accept": n_accept, "n_reject": n_reject}
