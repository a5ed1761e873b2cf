"""Formal normalization of connection germs at an irregular singularity.

A germ A^h dz/z^k with regular semisimple leading coefficient is gauged
into its diagonal form A^0 = (A^0_0/z^k + ... + A^0_{k-2}/z^2 + L/z) dz
by the inductive loop exp(z^p H_p), H_p = ad_{A0}^{-1} of the
off-diagonal part of the p-th coefficient, followed by the diagonal
integrating factor exp(-int D).  The returned gauge series is the
inverse of that product, so gauging A^0 by it reproduces the germ.

All series are dense matrix coefficient arrays truncated at a fixed
order; no summability bookkeeping is attempted, outputs are exact to
the stated order only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, MembershipError
from .liealg import TOL_DEC, CartanElement, ad_inverse_offdiag, root_space_decompose


@dataclass(frozen=True)
class ConnectionGerm:
    """Coefficients A_0..A_M of A^h dz/z^k; A_0 must be regular Cartan."""

    k: int
    coeffs: np.ndarray  # (M+1, m, m) complex

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        if self.k < 2:
            raise CapabilityError("pole order must be at least 2")

    @property
    def order(self):
        return self.coeffs.shape[0] - 1


@dataclass(frozen=True)
class FormalType:
    """Cartan data (A^0_0 .. A^0_{k-2}, Lambda) of the diagonalized germ."""

    k: int
    irregular: tuple          # k-1 CartanElements
    lam: CartanElement        # exponent of formal monodromy

    def principal_coeffs(self, datum, order):
        """Germ coefficient array of the principal part, padded to ``order``."""
        m = datum.defining_dim
        out = np.zeros((order + 1, m, m), dtype=complex)
        for j, h in enumerate(self.irregular):
            out[j] = datum.embed_cartan(h)
        out[self.k - 1] = datum.embed_cartan(self.lam)
        return out

    def q_coefficient(self, datum, root_index):
        """c with root o q = c z^{1-k} for the leading term q."""
        return datum.root_value(root_index, self.irregular[0]) / (1 - self.k)


@dataclass(frozen=True)
class GaugeSeries:
    """Truncated series 1 + F_1 z + ... + F_N z^N."""

    coeffs: np.ndarray  # (N+1, m, m)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        m = self.coeffs.shape[1]
        if np.max(np.abs(self.coeffs[0] - np.eye(m))) > 1e-13:
            raise MembershipError("gauge series must start at the identity")

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    def evaluate(self, z):
        out = np.zeros_like(self.coeffs[0])
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out


# -- series helpers ----------------------------------------------------------

def series_mul(a, b, order):
    out = np.zeros((order + 1,) + a.shape[1:], dtype=complex)
    for i in range(min(order + 1, a.shape[0])):
        jmax = min(order - i + 1, b.shape[0])
        for j in range(jmax):
            out[i + j] += a[i] @ b[j]
    return out


def series_inv(a, order):
    m = a.shape[1]
    out = np.zeros((order + 1, m, m), dtype=complex)
    a0inv = np.linalg.inv(a[0])
    out[0] = a0inv
    for n in range(1, order + 1):
        acc = np.zeros((m, m), dtype=complex)
        for j in range(1, min(n, a.shape[0] - 1) + 1):
            acc += a[j] @ out[n - j]
        out[n] = -a0inv @ acc
    return out


def series_exp(a, order):
    """exp of a matrix series with zero constant term, truncated."""
    m = a.shape[1]
    out = np.zeros((order + 1, m, m), dtype=complex)
    out[0] = np.eye(m)
    term = np.zeros_like(out)
    term[0] = np.eye(m)
    for j in range(1, order + 1):
        term = series_mul(term, a, order) / j
        out += term
        if not np.any(term):
            break
    return out


def series_exp_znH(h_mat, p, order, m):
    """exp(z^p H) as a truncated series."""
    out = np.zeros((order + 1, m, m), dtype=complex)
    out[0] = np.eye(m)
    term = np.eye(m, dtype=complex)
    fact = 1.0
    j = 1
    while j * p <= order:
        term = term @ h_mat
        fact *= j
        out[j * p] = term / fact
        j += 1
    return out


def gauge_transform(g, coeffs, k, order):
    """Coefficients of g[A]: g A g^{-1} + z^k g' g^{-1}, truncated."""
    ginv = series_inv(g, order)
    out = series_mul(series_mul(g, coeffs, order), ginv, order)
    # z^k g'(z) g^{-1}: index q picks up sum over p>=1 with p+k-1+j = q
    for q in range(k, order + 1):
        acc = np.zeros_like(out[0])
        for p in range(1, q - k + 2):
            j = q - k + 1 - p
            if p < g.shape[0] and j < ginv.shape[0]:
                acc += p * (g[p] @ ginv[j])
        out[q] += acc
    return out


# -- operations --------------------------------------------------------------

def formal_normalize(datum, germ, n_order, tol_dec=TOL_DEC):
    """Compute the formal type and gauge series of a generic germ.

    Needs germ coefficients up to order ``n_order + k - 1``.  Returns
    ``(FormalType, GaugeSeries)`` with the gauge truncated at ``n_order``.
    """
    k = germ.k
    m = datum.defining_dim
    work_order = n_order + k - 1
    if germ.order < work_order:
        raise CapabilityError(
            f"germ supplies order {germ.order}, need {work_order} for N={n_order}")

    a0_h, _ = root_space_decompose(datum, germ.coeffs[0])
    off0 = germ.coeffs[0] - datum.embed_cartan(a0_h)
    if np.max(np.abs(off0)) > tol_dec:
        raise MembershipError("leading coefficient is not in the Cartan subalgebra")
    datum.check_regular(a0_h)

    s = np.array(germ.coeffs[: work_order + 1], dtype=complex)
    hprod = np.zeros((work_order + 1, m, m), dtype=complex)
    hprod[0] = np.eye(m)
    for p in range(1, work_order + 1):
        h_c, _ = root_space_decompose(datum, s[p])
        off = s[p] - datum.embed_cartan(h_c)
        if np.max(np.abs(off)) <= 1e-15:
            continue
        hp = ad_inverse_offdiag(datum, a0_h, off)
        g = series_exp_znH(hp, p, work_order, m)
        s = gauge_transform(g, s, k, work_order)
        hprod = series_mul(g, hprod, work_order)

    irregular = []
    for j in range(k - 1):
        hj, _ = root_space_decompose(datum, s[j])
        irregular.append(hj)
    lam, _ = root_space_decompose(datum, s[k - 1])
    ftype = FormalType(k=k, irregular=tuple(irregular), lam=lam)

    # diagonal integrating factor exp(-int D), D = nonsingular tail
    prim = np.zeros((work_order + 1, m, m), dtype=complex)
    for q in range(k, work_order + 1):
        prim[q - k + 1] = s[q] / (q - k + 1)
    ftil = np.zeros((work_order + 1, m, m), dtype=complex)
    ftil[0] = np.eye(m)
    term = np.zeros((work_order + 1, m, m), dtype=complex)
    term[0] = np.eye(m)
    for j in range(1, work_order + 1):
        term = series_mul(term, -prim, work_order) / j
        ftil += term
        if not np.any(term):
            break

    fhat = series_inv(series_mul(ftil, hprod, work_order), work_order)
    return ftype, GaugeSeries(coeffs=fhat[: n_order + 1])


def apply_gauge_series(datum, gauge, ftype, n_order):
    """Gauge the diagonal form by the series; inverse of normalization."""
    if gauge.order < n_order:
        raise CapabilityError(f"gauge order {gauge.order} < requested {n_order}")
    base = ftype.principal_coeffs(datum, n_order)
    g = gauge.coeffs[: n_order + 1]
    out = gauge_transform(g, base, ftype.k, n_order)
    return ConnectionGerm(k=ftype.k, coeffs=out)
