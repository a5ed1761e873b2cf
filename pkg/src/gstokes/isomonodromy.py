"""The nonlinear deformation flow over the regular Cartan locus.

Moving the leading coefficient A0 while keeping monodromy data fixed
forces the residue B to obey  dB = [B, ad_{A0}^{-1}([dA0, B])].  This
module integrates that equation along piecewise line/arc paths, builds
the generator loops (segment, small positive semicircle about the wall
crossing, segment), and evaluates the time-dependent Hamiltonians.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel
from .errors import GeometryError, RegularityError
from .liealg import (
    TOL_REG,
    CartanElement,
    ad_inverse_offdiag,
    invariant_form,
    weyl_reflection,
)


@dataclass(frozen=True)
class TregPath:
    """Piecewise path in Cartan coordinates staying off the root walls."""

    pieces: tuple   # LinePath / ArcPath instances over C^rank

    def points(self, samples_per_piece=33):
        ts = np.linspace(0.0, 1.0, samples_per_piece)
        out = []
        for piece in self.pieces:
            for t in ts:
                g, _ = piece.at(t)
                out.append(np.atleast_1d(g))
        return np.array(out)

    def start(self):
        g, _ = self.pieces[0].at(0.0)
        return CartanElement(np.atleast_1d(g))

    def end(self):
        g, _ = self.pieces[-1].at(1.0)
        return CartanElement(np.atleast_1d(g))

    def reversed(self):
        rev = []
        for piece in self.pieces[::-1]:
            if isinstance(piece, kernel.LinePath):
                rev.append(kernel.LinePath(piece.end, piece.start))
            else:
                rev.append(kernel.ArcPath(piece.center, piece.ray,
                                          piece.angle1, piece.angle0))
        return TregPath(pieces=tuple(rev))

    def regularity_margin(self, datum, samples_per_piece=65):
        pts = self.points(samples_per_piece)
        rows = np.array([r.coords for r in datum.roots], dtype=complex)
        vals = np.abs(pts @ rows.T)
        return float(np.min(vals))


@dataclass(frozen=True)
class FlowState:
    a0: CartanElement
    b: np.ndarray


def closed_rectangle(corner, du, dv):
    """Closed rectangular loop corner -> +du -> +dv -> -du -> -dv."""
    c = np.asarray(corner, dtype=complex)
    du = np.asarray(du, dtype=complex)
    dv = np.asarray(dv, dtype=complex)
    return TregPath(pieces=(
        kernel.LinePath(c, c + du),
        kernel.LinePath(c + du, c + du + dv),
        kernel.LinePath(c + du + dv, c + dv),
        kernel.LinePath(c + dv, c),
    ))


def imd_vector_field(datum, b, a0, v):
    """[B, ad_{A0}^{-1}([v, B])] for a deformation direction v."""
    a0_mat = datum.embed_cartan(a0)
    v_mat = datum.embed_cartan(v)
    inner = ad_inverse_offdiag(datum, a0, v_mat @ b - b @ v_mat)
    return b @ inner - inner @ b


def _imd_term(datum, piece):
    rows = np.array([r.coords for r in datum.roots], dtype=complex)
    nr = datum.n_roots
    extract = datum._dual[:nr]
    rootvec = np.stack([datum.basis.e[i] for i in range(nr)])
    return kernel.IMDTerm(path=piece, extract=extract, rootvec=rootvec,
                          root_rows=rows)


def integrate_flow(datum, b0, path, tol_ode=1e-9, check_margin=True,
                   tol_reg=TOL_REG, **kw):
    """Transport B along a regular path; returns the endpoint value."""
    if check_margin and path.regularity_margin(datum) <= tol_reg:
        raise RegularityError("path regularity margin below tolerance")
    y, stats = kernel.propagate_pieces(
        lambda piece: _imd_term(datum, piece), path.pieces,
        np.asarray(b0, dtype=complex), rtol=tol_ode, atol=tol_ode * 1e-3, **kw)
    return y, stats


def brieskorn_path(datum, i, a0_star, eps=None):
    """Generator loop: straight run at s_i(A0*) with a positive semicircle.

    The midpoint of the segment lies on the wall of the i-th simple
    root only; every other root keeps a positive real part along the
    whole path when eps is small enough (checked, not assumed).
    """
    a0_star = a0_star if isinstance(a0_star, CartanElement) else CartanElement(a0_star)
    if np.max(np.abs(np.imag(a0_star.coords))) > 1e-12:
        raise GeometryError("base point must be real")
    pos = [datum.root_value(j, a0_star) for j in datum.positive_root_indices()]
    if min(np.real(v) for v in pos) <= 0:
        raise GeometryError("base point must be dominant regular")
    end = weyl_reflection(datum, i, a0_star)
    mid = (a0_star.coords + end.coords) / 2.0
    u = a0_star.coords - mid
    idx = datum.simple_index(i)
    # distance (in u-units) from the midpoint to the nearest other wall
    margin = np.inf
    for j, r in enumerate(datum.roots):
        if j == idx or j == datum.negation[idx]:
            continue
        bu = r.value(u)
        if abs(bu) < 1e-14:
            continue
        margin = min(margin, abs(r.value(mid)) / abs(bu))
    if eps is None:
        eps = margin / 4.0 if np.isfinite(margin) else 0.5
    if np.isfinite(margin) and eps >= margin:
        raise GeometryError(f"semicircle radius {eps} reaches a wall (margin {margin:.3g})")
    path = TregPath(pieces=(
        kernel.LinePath(a0_star.coords, mid + eps * u),
        kernel.ArcPath(mid, eps * u, 0.0, np.pi),
        kernel.LinePath(mid - eps * u, end.coords),
    ))
    # the crossing root must sweep phase 0 -> pi through the upper half plane
    ts = np.linspace(0.0, 1.0, 65)
    vals = np.array([datum.root_value(idx, CartanElement(np.atleast_1d(path.pieces[1].at(t)[0])))
                     for t in ts])
    ph = np.unwrap(np.angle(vals))
    if not (abs(ph[0]) < 1e-9 and abs(ph[-1] - np.pi) < 1e-9 and
            np.all(np.diff(ph) > 0)):
        raise GeometryError("crossing root does not sweep (0, pi) positively")
    return path


def hamiltonian(datum, v, b, a0):
    """H_v = K(B, ad_{A0}^{-1}([v, B])); pairs the flow one-form with v."""
    v_mat = datum.embed_cartan(v)
    inner = ad_inverse_offdiag(datum, a0, v_mat @ b - b @ v_mat)
    return invariant_form(b, inner)


def varpi_eval(datum, a0, b, v):
    """One-form of the flow evaluated on the tangent vector v at A0."""
    return hamiltonian(datum, v, b, a0)


def hamiltonian_gradient(datum, v, b, a0):
    """G with d/dt f(B) = K(B, [G, grad f]) along the flow of direction v."""
    v_mat = datum.embed_cartan(v)
    return ad_inverse_offdiag(datum, a0, v_mat @ b - b @ v_mat)


def lie_poisson_pairing(datum, b, grad_g, grad_h):
    """K(B, [grad_g, grad_h]) - the ambient Lie-Poisson pairing."""
    return invariant_form(b, grad_g @ grad_h - grad_h @ grad_g)
