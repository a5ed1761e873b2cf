"""Pure-numpy adaptive stepper: Dormand-Prince 5(4) with FSAL.

This is the reference implementation; the Cython lane in ``_native.pyx``
runs the same tableau, error norm and step controller, so results agree
to rounding.  Tolerances follow the usual per-step contract
|err_i| <= atol + rtol * max(|y0_i|, |y1_i|) with an RMS acceptance norm.
"""

from __future__ import annotations

import numpy as np

from ..errors import IntegrationError

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
ERR = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                -17253 / 339200, 22 / 525, -1 / 40])

MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
SAFETY = 0.9


def _norm(err, y0, y1, rtol, atol):
    sc = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean(np.abs(err / sc) ** 2)))


def propagate(term, y0, rtol=1e-9, atol=1e-12, max_steps=1_000_000, trace=None):
    """Integrate dY/dt = term.rhs(t, Y) from t=0 to t=1.

    Returns ``(y1, stats)`` where stats is a dict with step counts.
    If ``trace`` is a list, accepted ``(t, Y.copy())`` pairs are appended.
    """
    y = np.array(y0, dtype=complex)
    t = 0.0
    k = [None] * 7
    k[0] = term.rhs(0.0, y)

    sc = atol + rtol * np.abs(y)
    d0 = float(np.sqrt(np.mean(np.abs(y / sc) ** 2)))
    d1 = float(np.sqrt(np.mean(np.abs(k[0] / sc) ** 2)))
    h = 0.01 * d0 / d1 if d1 > 1e-16 * max(d0, 1.0) else 1e-3
    h = min(h, 1.0)

    n_accept = n_reject = 0
    if trace is not None:
        trace.append((0.0, y.copy()))
    while t < 1.0:
        final = h >= 1.0 - t
        h = min(h, 1.0 - t)
        if h < 1e-15:
            raise IntegrationError(f"step size underflow at t={t}")
        for stage in range(1, 7):
            ys = y
            for j, a in enumerate(A[stage]):
                if a != 0.0:
                    ys = ys + (h * a) * k[j]
            k[stage] = term.rhs(t + C[stage] * h, ys)
        y1 = y
        for j in range(7):
            if B5[j] != 0.0:
                y1 = y1 + (h * B5[j]) * k[j]
        err = np.zeros_like(y)
        for j in range(7):
            if ERR[j] != 0.0:
                err = err + (h * ERR[j]) * k[j]
        enorm = _norm(err, y, y1, rtol, atol)
        if not np.isfinite(enorm):
            n_reject += 1
            h *= 0.2
            if n_accept + n_reject > max_steps:
                raise IntegrationError(f"step budget {max_steps} exhausted at t={t}")
            continue
        if enorm <= 1.0:
            t = 1.0 if final else t + h
            y = y1
            k[0] = k[6]  # FSAL
            n_accept += 1
            if trace is not None:
                trace.append((t, y.copy()))
            factor = MAX_FACTOR if enorm == 0.0 else min(
                MAX_FACTOR, max(MIN_FACTOR, SAFETY * enorm ** -0.2))
        else:
            n_reject += 1
            factor = max(MIN_FACTOR, min(SAFETY, SAFETY * enorm ** -0.2))
        h *= factor
        if n_accept + n_reject > max_steps:
            raise IntegrationError(f"step budget {max_steps} exhausted at t={t}")
    return y, {"n_accept": n_accept, "n_reject": n_reject}
