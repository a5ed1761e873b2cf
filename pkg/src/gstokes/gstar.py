"""The dual Poisson Lie group G* and its braid group actions.

Points are triples (b_-, b_+, L) with delta_-(b_-) delta_+(b_+) = 1 and
delta_+(b_+) = exp(pi i L); they encode Stokes multipliers through
b_- = e^{-pi i L} S_-^{-1} and b_+ = e^{-pi i L} S_+ e^{2 pi i L}.

Two explicit braid generator actions are implemented: the loop holonomy
of the flat structure on the twisted bundle over the regular Cartan
quotient, and the generator written down by De Concini, Kac and
Procesi; they are mutually inverse bijections of G*, which is the whole
point and is exercised heavily by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MembershipError
from .liealg import (
    CartanElement,
    unipotent_exp,
    unipotent_log,
    weyl_reflection,
)
from .stokes_geometry import support_residual, xi_component


@dataclass(frozen=True)
class GStarPoint:
    """(b_-, b_+, Lambda) relative to a positive system (default standard)."""

    b_minus: np.ndarray
    b_plus: np.ndarray
    lam: CartanElement
    positive: tuple | None = None    # root indices; None = standard Borel

    def torus_part(self, datum):
        return np.diag(np.exp(1j * np.pi * np.diagonal(datum.embed_cartan(self.lam))))

    def coarse(self, datum):
        """The quotient datum that only remembers exp(pi i Lambda)."""
        return self.b_minus, self.b_plus, self.torus_part(datum)


@dataclass(frozen=True)
class TitsElement:
    """Lift of a Weyl group element along words in exp(f) exp(-e) exp(f)."""

    word: tuple
    matrix: np.ndarray


def _positive_set(datum, p):
    return tuple(p.positive) if p.positive is not None else datum.positive_root_indices()


def validate_gstar(datum, p, tol=1e-9):
    """Max violation of the triangularity and torus constraints."""
    pos = set(_positive_set(datum, p))
    neg = {datum.negation[i] for i in pos}
    t = p.torus_part(datum)
    tinv = np.linalg.inv(t)
    res = 0.0
    try:
        res = max(res, support_residual(datum, tinv @ p.b_plus, pos))
        res = max(res, support_residual(datum, t @ p.b_minus, neg))
    except MembershipError:
        return np.inf
    return res


def gstar_from_stokes(datum, s_plus, s_minus, lam, positive=None, tol_memb=1e-8):
    """Stokes multipliers -> G* point: b_- = t^{-1} S_-^{-1}, b_+ = t^{-1} S_+ t^2."""
    lam = lam if isinstance(lam, CartanElement) else CartanElement(lam)
    pos = tuple(positive) if positive is not None else datum.positive_root_indices()
    neg = tuple(datum.negation[i] for i in pos)
    if support_residual(datum, s_plus, set(pos)) > tol_memb:
        raise MembershipError("S_+ is not in the positive unipotent group")
    if support_residual(datum, s_minus, set(neg)) > tol_memb:
        raise MembershipError("S_- is not in the negative unipotent group")
    t = np.diag(np.exp(1j * np.pi * np.diagonal(datum.embed_cartan(lam))))
    m0 = t @ t
    b_minus = np.linalg.inv(t) @ np.linalg.inv(s_minus)
    b_plus = np.linalg.inv(t) @ s_plus @ m0
    return GStarPoint(b_minus=b_minus, b_plus=b_plus, lam=lam, positive=positive)


def stokes_from_gstar(datum, p, tol_memb=1e-8):
    """Exact inverse of :func:`gstar_from_stokes`."""
    pos = set(_positive_set(datum, p))
    neg = {datum.negation[i] for i in pos}
    t = p.torus_part(datum)
    m0inv = np.linalg.inv(t @ t)
    s_minus = np.linalg.inv(t @ p.b_minus)
    s_plus = t @ p.b_plus @ m0inv
    if support_residual(datum, s_plus, pos) > tol_memb:
        raise MembershipError("recovered S_+ leaves its unipotent group")
    if support_residual(datum, s_minus, neg) > tol_memb:
        raise MembershipError("recovered S_- leaves its unipotent group")
    return s_plus, s_minus, p.lam


def tits_generator(datum, i, sign_convention="standard"):
    """t_i = exp(f_i) exp(-e_i) exp(f_i), or its inverse."""
    idx = datum.simple_index(i)
    e = datum.basis.e[idx]
    f = datum.basis.e[datum.negation[idx]]
    t = unipotent_exp(f) @ unipotent_exp(-e) @ unipotent_exp(f)
    if sign_convention == "inverted":
        t = np.linalg.inv(t)
    elif sign_convention != "standard":
        raise ValueError(f"unknown sign convention {sign_convention!r}")
    return TitsElement(word=(i if sign_convention == "standard" else -i,), matrix=t)


def tits_word(datum, word, sign_convention="standard"):
    """Product of generators t_{i} (inverse for negative index)."""
    m = np.eye(datum.defining_dim, dtype=complex)
    for i in word:
        t = tits_generator(datum, abs(i), sign_convention).matrix
        m = m @ (t if i > 0 else np.linalg.inv(t))
    return TitsElement(word=tuple(word), matrix=m)


def gamma_action(datum, g, s_plus, s_minus, lam):
    """Simultaneous conjugation of Stokes data by a torus normalizer."""
    gmat = g.matrix if isinstance(g, TitsElement) else np.asarray(g, dtype=complex)
    ginv = np.linalg.inv(gmat)
    lam_mat = gmat @ datum.embed_cartan(lam) @ ginv
    if np.max(np.abs(lam_mat - np.diag(np.diagonal(lam_mat)))) > 1e-10:
        raise MembershipError("conjugator does not normalize the torus")
    return (gmat @ s_plus @ ginv, gmat @ s_minus @ ginv,
            datum.cartan_from_matrix(lam_mat))


def _components(datum, p):
    """Left and right unipotent parts of b_{+-} and their xi images.

    With b_+ = v_+ t = t u_+ and b_- = v_- t^{-1} = t^{-1} u_-, returns
    the inverted simple components ib_+ = xi_i(v_+)^{-1} etc. as a dict
    of callables indexed by the simple root.
    """
    t = p.torus_part(datum)
    tinv = np.linalg.inv(t)
    v_plus = p.b_plus @ tinv
    u_plus = tinv @ p.b_plus
    v_minus = p.b_minus @ t
    u_minus = t @ p.b_minus
    return t, v_plus, u_plus, v_minus, u_minus


def holonomy_generator(datum, i, p, tits_matrix=None, tol_memb=1e-8):
    """Loop holonomy of the isomonodromy structure for one braid generator.

    In G* coordinates: (b_-, b_+) -> (w^{-1} ib_+ b_- b_-^i w,
    w^{-1} ib_+ b_+ b_-^i w) with w = t_i, and Lambda -> s_i(Lambda).
    """
    t, v_plus, u_plus, v_minus, u_minus = _components(datum, p)
    ib_plus = np.linalg.inv(xi_component(datum, v_plus, +i, tol_memb))
    b_minus_i = np.linalg.inv(xi_component(datum, u_minus, -i, tol_memb))
    w = tits_matrix if tits_matrix is not None else tits_generator(datum, i).matrix
    winv = np.linalg.inv(w)
    b_minus = winv @ ib_plus @ p.b_minus @ b_minus_i @ w
    b_plus = winv @ ib_plus @ p.b_plus @ b_minus_i @ w
    lam = weyl_reflection(datum, i, p.lam)
    return GStarPoint(b_minus=b_minus, b_plus=b_plus, lam=lam, positive=p.positive)


def dkp_generator(datum, i, p, sign_convention="standard", tol_memb=1e-8):
    """Braid generator T_i of the quantum-Weyl-group classical limit.

    (b_-, b_+) -> (w ib_- b_- b_+^i w^{-1}, w ib_- b_+ b_+^i w^{-1})
    with w = t_i (or t_i^{-1} in the inverted convention), and
    Lambda -> s_i(Lambda).  Inverse of :func:`holonomy_generator`.
    """
    t, v_plus, u_plus, v_minus, u_minus = _components(datum, p)
    ib_minus = np.linalg.inv(xi_component(datum, v_minus, -i, tol_memb))
    b_plus_i = np.linalg.inv(xi_component(datum, u_plus, +i, tol_memb))
    w = tits_generator(datum, i, sign_convention).matrix
    winv = np.linalg.inv(w)
    b_minus = w @ ib_minus @ p.b_minus @ b_plus_i @ winv
    b_plus = w @ ib_minus @ p.b_plus @ b_plus_i @ winv
    lam = weyl_reflection(datum, i, p.lam)
    return GStarPoint(b_minus=b_minus, b_plus=b_plus, lam=lam, positive=p.positive)


def holonomy_generator_stokes(datum, i, s_plus, s_minus, lam, tol_memb=1e-8):
    """Stokes-multiplier form of the pre-twist holonomy transition.

    S'_+ = xi_i(S_+)^{-1} S_+ M0 xi_{-i}(S_-) M0^{-1},
    S'_- = xi_{-i}(S_-)^{-1} S_- xi_i(S_+);  Lambda unchanged.
    The result lives in the reflected unipotent pair.
    """
    m0 = np.diag(np.exp(2j * np.pi * np.diagonal(datum.embed_cartan(lam))))
    m0inv = np.linalg.inv(m0)
    xp = xi_component(datum, s_plus, +i, tol_memb)
    xm = xi_component(datum, s_minus, -i, tol_memb)
    s_plus_new = np.linalg.inv(xp) @ s_plus @ m0 @ xm @ m0inv
    s_minus_new = np.linalg.inv(xm) @ s_minus @ xp
    return s_plus_new, s_minus_new, lam


def braid_word_apply(datum, word, p, action="dkp", sign_convention="standard"):
    """Apply a word of signed generator indices left to right."""
    if action not in ("dkp", "holonomy"):
        raise ValueError(f"unknown action {action!r}")
    out = p
    for i in word:
        forward = (i > 0) == (action == "dkp")
        if forward:
            out = dkp_generator(datum, abs(i), out, sign_convention)
        else:
            if sign_convention == "inverted":
                w = tits_generator(datum, abs(i), "inverted").matrix
                out = holonomy_generator(datum, abs(i), out, tits_matrix=w)
            else:
                out = holonomy_generator(datum, abs(i), out)
    return out


def big_cell_action(datum, i, a, tol_cell=1e-12):
    """Action on the big cell u_- t^2 u_+: a -> w^{-1} xi_i(u_+) a xi_i(u_+)^{-1} w."""
    from .liealg import big_cell_factorize
    _, _, up = big_cell_factorize(a, tol_cell=tol_cell)
    x = xi_component(datum, up, +i)
    w = tits_generator(datum, i).matrix
    return np.linalg.inv(w) @ x @ a @ np.linalg.inv(x) @ w
