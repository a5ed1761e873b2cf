"""Directional combinatorics of an irregular singularity.

For a regular leading coefficient the rays where exp(root o q) decays
fastest split the circle into sectors; consecutive runs of l of them
(half-periods) carry systems of positive roots and unipotent groups in
which Stokes factors and multipliers live.  Everything here is exact
combinatorics plus angle arithmetic; no ODEs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExtractionError, GeometryError, MembershipError
from .liealg import (
    CartanElement,
    positive_system_from_regular,
    root_space_decompose,
    unipotent_exp,
    unipotent_log,
)

TOL_ANG = 1e-9
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AntiStokesDiagram:
    """Sorted anti-Stokes directions with their supporting roots."""

    k: int
    a0: CartanElement
    angles: np.ndarray            # sorted in [0, 2pi)
    supports: tuple               # tuple of frozensets of root indices
    l: int                        # directions per half-period

    @property
    def n(self):
        return len(self.angles)

    def stokes_angles(self):
        """Directions where asymptotic regimes change (anti-Stokes + pi/(2k-2))."""
        return np.sort((self.angles + np.pi / (2 * self.k - 2)) % TWO_PI)


@dataclass(frozen=True)
class SectorChoice:
    """Reference point on the universal cover: angle plus actual arg value."""

    base_angle: float
    log_branch: float | None = None   # Im log z at the reference point

    def __post_init__(self):
        if self.log_branch is None:
            object.__setattr__(self, "log_branch", float(self.base_angle))
        if abs(((self.base_angle - self.log_branch) + np.pi) % TWO_PI - np.pi) > 1e-12:
            raise GeometryError("log_branch must lift base_angle")


@dataclass(frozen=True)
class StokesData:
    """Ordered Stokes factors and multipliers relative to a labeled diagram."""

    factors: tuple                # len n, group elements
    multipliers: tuple            # len 2k-2
    lam: CartanElement
    positive_roots: tuple         # union over the first half-period

    def formal_monodromy(self, datum):
        return np.diag(np.exp(2j * np.pi * np.diagonal(datum.embed_cartan(self.lam))))


def anti_stokes(datum, a0, k, tol_ang=TOL_ANG):
    """Anti-Stokes diagram of z^{1-k} A0/(1-k): directions of fastest decay."""
    datum.check_regular(a0)
    raw = []
    for r in datum.roots:
        c = datum.root_value(r.index, a0) / (1 - k)
        psi = np.angle(c)
        for j in range(k - 1):
            theta = (psi - np.pi + TWO_PI * j) / (k - 1) % TWO_PI
            raw.append((theta, r.index))
    raw.sort()
    merged = []
    for theta, idx in raw:
        if merged and (theta - merged[-1][0]) <= tol_ang:
            merged[-1][1].add(idx)
        else:
            merged.append([theta, {idx}])
    # cyclic merge across 0 / 2pi
    if len(merged) > 1 and (merged[0][0] + TWO_PI - merged[-1][0]) <= tol_ang:
        merged[0][1] |= merged[-1][1]
        merged.pop()
    n = len(merged)
    if n % (2 * k - 2) != 0:
        raise GeometryError(f"{n} directions do not split into {2*k-2} half-periods")
    counts = sum(len(s) for _, s in merged)
    if counts != (k - 1) * datum.n_roots:
        raise GeometryError("support multiplicity mismatch after merging")
    return AntiStokesDiagram(
        k=k, a0=a0 if isinstance(a0, CartanElement) else CartanElement(a0),
        angles=np.array([t for t, _ in merged]),
        supports=tuple(frozenset(s) for _, s in merged),
        l=n // (2 * k - 2),
    )


def half_periods(diagram, start=0):
    """Split the direction list into 2k-2 runs of l, starting at ``start``.

    Returns a list of (direction indices, union of supporting roots).
    """
    n = diagram.n
    out = []
    for j in range(2 * diagram.k - 2):
        idxs = tuple((start + j * diagram.l + i) % n for i in range(diagram.l))
        union = frozenset().union(*(diagram.supports[i] for i in idxs))
        out.append((idxs, tuple(sorted(union))))
    return out


def direction_weyl_chamber(datum, a0, k, theta, tol_ang=TOL_ANG):
    """Positive system of Re(A0 e^{-i(k-1)theta}); theta must avoid Stokes rays."""
    diagram = anti_stokes(datum, a0, k)
    stokes = diagram.stokes_angles()
    dist = np.abs(((stokes - theta) + np.pi) % TWO_PI - np.pi)
    if np.min(dist) <= tol_ang:
        raise GeometryError(f"{theta} is a Stokes direction")
    coords = np.asarray(a0.coords if isinstance(a0, CartanElement) else a0, dtype=complex)
    lam = CartanElement(np.real(coords * np.exp(-1j * (k - 1) * theta)))
    return positive_system_from_regular(datum, lam)


def is_closed_root_set(datum, indices):
    s = set(indices)
    coord = {i: np.asarray(datum.roots[i].coords) for i in s}
    all_coords = {datum.roots[i].coords: i for i in range(datum.n_roots)}
    for a in s:
        for b in s:
            tot = tuple(int(x) for x in coord[a] + coord[b])
            if tot in all_coords and all_coords[tot] not in s:
                return False
    return True


def support_residual(datum, u, allowed):
    """Largest log coefficient of a unipotent element outside ``allowed`` roots.

    This grades rather than gates: off-algebra junk and Cartan drift
    count toward the residual instead of raising, so numerically
    computed group elements can be measured, not just exact ones.  A
    grossly non-unipotent input simply scores a large residual.
    """
    from .liealg import root_space_project
    x = unipotent_log(u, tol=np.inf)
    h, c, err = root_space_project(datum, x)
    res = max(float(np.max(np.abs(h.coords), initial=0.0)), err)
    for i, ci in c.items():
        if i not in allowed:
            res = max(res, abs(ci))
    return res


def xi_component(datum, s_mat, signed_i, tol_memb=1e-8):
    """Simple-root-component homomorphism xi_{+-i} of a unipotent element.

    Commutators of root vectors raise height, so the height-one
    coefficient of log S is independent of any ordered factorization;
    exp of that coefficient is the u_{alpha_i} factor.
    """
    from .liealg import root_space_project
    idx = datum.simple_index(abs(signed_i))
    if signed_i < 0:
        idx = datum.negation[idx]
    x = unipotent_log(s_mat, tol=np.inf)
    h, c, err = root_space_project(datum, x)
    scale = max(1.0, float(np.max(np.abs(x))))
    if max(float(np.max(np.abs(h.coords), initial=0.0)), err) > tol_memb * scale:
        raise MembershipError("element is not unipotent for any Borel")
    return unipotent_exp(c[idx] * datum.basis.e[idx])


def factors_to_multipliers(datum, diagram, factors, lam, start=0, tol_memb=1e-8):
    """Assemble multipliers S_j = K_{jl} ... K_{(j-1)l+1} from factors."""
    n = diagram.n
    if len(factors) != n:
        raise ExtractionError(f"need {n} factors, got {len(factors)}")
    hp = half_periods(diagram, start)
    for pos, kmat in enumerate(factors):
        sup = diagram.supports[(start + pos) % n]
        res = support_residual(datum, kmat, sup)
        if res > tol_memb:
            raise ExtractionError(
                f"factor {pos} has support outside its direction group ({res:.2e})")
    mult = []
    for j, (idxs, union) in enumerate(hp):
        s = np.eye(datum.defining_dim, dtype=complex)
        for i in range(diagram.l):  # K_{jl} ... K_{(j-1)l+1}
            s = s @ factors[j * diagram.l + diagram.l - 1 - i]
        mult.append(s)
    return StokesData(factors=tuple(factors), multipliers=tuple(mult),
                      lam=lam if isinstance(lam, CartanElement) else CartanElement(lam),
                      positive_roots=hp[0][1])


def multipliers_to_factors(datum, diagram, multipliers, start=0, tol=1e-13,
                           tol_memb=1e-8):
    """Unique factorization of each multiplier into direction groups.

    Solved by height iteration: corrections from fixing the lowest
    unresolved height live at strictly greater heights, so the loop
    terminates within the nilpotency class.  Components outside the
    half-period support (or outside the algebra) are graded against
    ``tol_memb`` after convergence instead of being projected away.
    """
    from .liealg import root_space_project
    hp = half_periods(diagram, start)
    n = diagram.n
    factors = [None] * n
    for j, ((idxs, union), s_mat) in enumerate(zip(hp, multipliers)):
        if not is_closed_root_set(datum, union):
            raise ExtractionError("half-period support is not closed; cannot factor")
        blocks = []  # in product order: direction jl, jl-1, ..., (j-1)l+1
        for i in range(diagram.l - 1, -1, -1):
            pos = (start + j * diagram.l + i) % n
            blocks.append((j * diagram.l + i, sorted(diagram.supports[pos])))
        order = [r for _, roots in blocks for r in roots]
        coeff = {r: 0.0 + 0j for r in order}
        scale = max(1.0, float(np.max(np.abs(s_mat))))
        junk = np.inf
        for _ in range(64):
            prod = np.eye(datum.defining_dim, dtype=complex)
            for r in order:
                prod = prod @ unipotent_exp(coeff[r] * datum.basis.e[r])
            resid = unipotent_log(np.linalg.solve(prod, s_mat))
            h, c, offerr = root_space_project(datum, resid)
            corr = max((abs(c[r]) for r in order), default=0.0)
            junk = max(offerr, float(np.max(np.abs(h.coords), initial=0.0)),
                       max((abs(ci) for i, ci in c.items() if i not in union),
                           default=0.0))
            for r in order:
                coeff[r] += c[r]
            if corr <= tol * scale:
                break
        else:
            raise ExtractionError("factor solve did not converge")
        if junk > tol_memb * scale:
            raise ExtractionError(
                f"multiplier {j} has support outside its half-period ({junk:.2e})")
        for slot, roots in blocks:
            kmat = np.eye(datum.defining_dim, dtype=complex)
            for r in roots:
                kmat = kmat @ unipotent_exp(coeff[r] * datum.basis.e[r])
            factors[slot] = kmat
    return tuple(factors)
