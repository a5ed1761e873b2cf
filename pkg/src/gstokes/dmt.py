"""Symmetrized quadratic Hamiltonians and the associated flat connection.

Each positive root contributes C_a = (a,a)/2 (rho(e_a) rho(f_a) +
rho(f_a) rho(e_a)); the one-form  h * sum_a C_a dalpha/alpha  on the
regular Cartan locus is flat, and its quadratic symbol reproduces the
deformation Hamiltonians exactly (both facts are checked numerically,
not assumed).  Representations: defining and adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel
from .errors import CapabilityError, RegularityError
from .liealg import (
    CartanElement,
    ad_inverse_offdiag,
    invariant_form,
    root_space_decompose,
)


@dataclass(frozen=True)
class RepData:
    """Matrices of the Chevalley generators in a representation."""

    name: str
    dimension: int
    rho_e: dict     # root index -> matrix (all roots)
    rho_t: np.ndarray  # (rank, d, d) images of the coordinate basis of t


def defining_rep(datum):
    rho_e = {i: datum.basis.e[i] for i in range(datum.n_roots)}
    rho_t = np.stack([datum.embed_cartan(np.eye(datum.rank)[j])
                      for j in range(datum.rank)])
    return RepData(name="defining", dimension=datum.defining_dim,
                   rho_e=rho_e, rho_t=rho_t)


def adjoint_rep(datum):
    """ad matrices in the basis (e_roots..., coordinate basis of t)."""
    nr = datum.n_roots
    d = nr + datum.rank
    basis_mats = [datum.basis.e[i] for i in range(nr)]
    basis_mats += [datum.embed_cartan(np.eye(datum.rank)[j])
                   for j in range(datum.rank)]

    def ad_matrix(x):
        cols = []
        for bmat in basis_mats:
            h, c = root_space_decompose(datum, x @ bmat - bmat @ x)
            col = np.array([c[i] for i in range(nr)] + list(h.coords))
            cols.append(col)
        return np.stack(cols, axis=1)

    rho_e = {i: ad_matrix(datum.basis.e[i]) for i in range(nr)}
    rho_t = np.stack([ad_matrix(basis_mats[nr + j]) for j in range(datum.rank)])
    return RepData(name="adjoint", dimension=d, rho_e=rho_e, rho_t=rho_t)


def get_rep(datum, name):
    if name == "defining":
        return defining_rep(datum)
    if name == "adjoint":
        return adjoint_rep(datum)
    raise CapabilityError(f"unknown representation {name!r}")


@dataclass(frozen=True)
class DMTForm:
    """One-form h * sum_a C_a dalpha/alpha with constant matrices C_a."""

    rep: RepData
    coupling: complex
    coeff_mats: np.ndarray     # (npos, d, d)
    root_rows: np.ndarray      # (npos, rank)
    positive: tuple

    def evaluate(self, datum, a0, v):
        """Matrix of the form at A0 contracted with direction v."""
        a = np.asarray(a0.coords if isinstance(a0, CartanElement) else a0, dtype=complex)
        w = np.asarray(v.coords if isinstance(v, CartanElement) else v, dtype=complex)
        s = self.coupling * (self.root_rows @ w) / (self.root_rows @ a)
        return np.tensordot(s, self.coeff_mats, axes=1)


def build_dmt_form(datum, rep, coupling=1.0):
    """Assemble the C_a matrices for all standard positive roots."""
    if isinstance(rep, str):
        rep = get_rep(datum, rep)
    pos = datum.positive_root_indices()
    mats, rows = [], []
    for i in pos:
        re = rep.rho_e[i]
        rf = rep.rho_e[datum.negation[i]]
        mats.append(0.5 * datum.norm2(i) * (re @ rf + rf @ re))
        rows.append(np.asarray(datum.roots[i].coords, dtype=complex))
    return DMTForm(rep=rep, coupling=complex(coupling),
                   coeff_mats=np.stack(mats), root_rows=np.stack(rows),
                   positive=pos)


def classical_quantum_compare(datum, a0, v, b):
    """|K(B, ad^{-1}[v,B]) - quadratic symbol of the symmetrized form|."""
    datum.check_regular(a0)
    v_mat = datum.embed_cartan(v)
    classical = invariant_form(b, ad_inverse_offdiag(datum, a0, v_mat @ b - b @ v_mat))
    total = 0.0 + 0j
    for i in datum.positive_root_indices():
        e = datum.basis.e[i]
        f = datum.basis.e[datum.negation[i]]
        av = datum.root_value(i, v)
        aa0 = datum.root_value(i, a0)
        total += (0.5 * datum.norm2(i)) * 2.0 \
            * invariant_form(b, e) * invariant_form(b, f) * av / aa0
    return abs(classical - total)


def dmt_flatness_check(form, datum, a0, u, v):
    """Curvature contraction on (u, v); zero iff the connection is flat."""
    datum.check_regular(a0)
    a = np.asarray(a0.coords, dtype=complex)
    uu = np.asarray(u.coords if isinstance(u, CartanElement) else u, dtype=complex)
    vv = np.asarray(v.coords if isinstance(v, CartanElement) else v, dtype=complex)
    au = form.root_rows @ uu
    av = form.root_rows @ vv
    aa = form.root_rows @ a
    n = len(form.positive)
    resid = np.zeros((form.rep.dimension, form.rep.dimension), dtype=complex)
    for i in range(n):
        for j in range(n):
            w = (au[i] * av[j] - av[i] * au[j]) / (2.0 * aa[i] * aa[j])
            if w != 0:
                ci, cj = form.coeff_mats[i], form.coeff_mats[j]
                resid += w * (ci @ cj - cj @ ci)
    return float(np.max(np.abs(resid)))


def dmt_holonomy(form, datum, loop, tol_ode=1e-10, **kw):
    """Path-ordered transport of d - (form) around a loop in t_reg."""
    start = loop.start()
    end = loop.end()
    if np.max(np.abs(start.coords - end.coords)) > 1e-12:
        raise RegularityError("holonomy needs a closed loop")
    d = form.rep.dimension
    y0 = np.eye(d, dtype=complex)
    term = lambda piece: kernel.CartanLinearTerm(
        path=piece, coeff_mats=form.coeff_mats, root_rows=form.root_rows,
        scale=form.coupling)
    y, stats = kernel.propagate_pieces(term, loop.pieces, y0,
                                       rtol=tol_ode, atol=tol_ode * 1e-3, **kw)
    return y, stats
