"""Numerical Stokes multipliers of (A0/z^2 + B/z) dz by sector matching.

Canonical fundamental solutions are seeded deep inside each sector with
the truncated gauge series times z^Lambda e^{-A0/z}, transported
outward along the sector's central ray, and compared after analytic
continuation halfway around the circle.  The central rays of the two
half-period sectors are the neutral directions of every root when A0 is
real or purely imaginary, which is what keeps the seeding well
conditioned; the two-radius residual measures how well it worked in any
case and is reported, never silently accepted.

Only the second-order pole is handled here; higher pole orders remain
purely combinatorial (see stokes_geometry).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .errors import ExtractionError, MatchingError
from .formal import ConnectionGerm, formal_normalize
from .liealg import CartanElement
from .stokes_geometry import (
    AntiStokesDiagram,
    SectorChoice,
    StokesData,
    anti_stokes,
    half_periods,
    multipliers_to_factors,
    support_residual,
)
from .gstar import GStarPoint, gstar_from_stokes

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class MatchingPlan:
    """Numerical policy for seeding and transporting canonical solutions.

    The default step tolerance sits a decade below the documented
    1e-9-per-unit-arclength contract so that accumulated transport error
    stays clear of it.
    """

    n_trunc: int = 12
    r_match: float | None = None      # None: optimal-truncation heuristic
    r_eval: float = 1.0
    tol_ode: float = 1e-10
    tol_match: float = 1e-5
    tol_memb: float = 1e-6
    check_two_radius: bool = True
    max_steps: int = 2_000_000


@dataclass(frozen=True)
class SectorFrame:
    """Labeled diagram: continued args of the directions d_1..d_m."""

    diagram: AntiStokesDiagram
    choice: SectorChoice
    start: int            # index of d_1 in diagram.angles
    args: np.ndarray      # continued args of d_1..d_m (increasing)

    @property
    def n(self):
        return self.diagram.n

    def sector_arg(self, i):
        """Central continued arg of Sect_i, i = 1..n."""
        lo = self.args[i - 1]
        hi = self.args[i] if i < self.n else self.args[0] + TWO_PI
        return 0.5 * (lo + hi)

    def positive_roots(self):
        return half_periods(self.diagram, self.start)[0][1]


def label_sectors(diagram, choice) -> SectorFrame:
    """Pick d_1 as the first direction past the reference angle."""
    base = choice.base_angle % TWO_PI
    deltas = (diagram.angles - base) % TWO_PI
    dist = np.minimum(deltas, TWO_PI - deltas)
    if float(np.min(dist)) <= 1e-9:
        raise MatchingError("reference angle sits on an anti-Stokes direction")
    start = int(np.argmin(np.where(deltas <= 1e-12, np.inf, deltas)))
    a1 = choice.log_branch + float(deltas[start]) - TWO_PI
    args = [a1]
    for j in range(1, diagram.n):
        idx = (start + j) % diagram.n
        gap = (diagram.angles[idx] - diagram.angles[(start + j - 1) % diagram.n]) % TWO_PI
        args.append(args[-1] + gap)
    return SectorFrame(diagram=diagram, choice=choice, start=start,
                       args=np.array(args))


def _diag_exp(datum, lam, z, arg):
    """Diagonal of z^Lambda on the branch where arg(z) = arg."""
    return np.exp(np.diagonal(datum.embed_cartan(lam)) * (np.log(abs(z)) + 1j * arg))


def _seed_value(datum, ftype, gauge, r, arg):
    """F_N(z) z^Lambda e^{Q(z)} at z = r e^{i arg} (continued branch)."""
    z = r * np.exp(1j * (arg % TWO_PI))
    fval = gauge.evaluate(z)
    zlam = _diag_exp(datum, ftype.lam, z, arg)
    q = -np.diagonal(datum.embed_cartan(ftype.irregular[0])) / z
    return fval * (zlam * np.exp(q))[np.newaxis, :]


def _ray_term(a0_mat, b_mat, r0, r1, arg):
    direction = np.exp(1j * (arg % TWO_PI))
    return kernel.ConnectionTerm(
        path=kernel.LinePath(r0 * direction, r1 * direction),
        mats=np.stack([a0_mat, b_mat]), powers=np.array([-2, -1]))


def _arc_term(a0_mat, b_mat, r, arg0, arg1):
    return kernel.ConnectionTerm(
        path=kernel.ArcPath(0.0 + 0j, r + 0j, arg0, arg1),
        mats=np.stack([a0_mat, b_mat]), powers=np.array([-2, -1]))


def pick_match_radius(datum, ftype, gauge, frame, plan):
    """Truncation-vs-roundoff tradeoff on the matching rays."""
    n = gauge.order
    tail = float(np.max(np.abs(gauge.coeffs[n])))
    m = frame.n
    l = frame.diagram.l
    rays = [frame.sector_arg(l), frame.sector_arg(m)]
    grow = 0.0
    for i in range(datum.n_roots):
        c = datum.root_value(i, ftype.irregular[0])
        for psi in rays:
            grow = max(grow, float(np.real(c * np.exp(-1j * psi))))
    grid = np.geomspace(0.04, 0.5, 48)
    cost = tail * grid ** n + 1e-14 * np.exp(np.minimum(grow / grid, 600.0))
    return float(grid[int(np.argmin(cost))])


def canonical_solution(datum, a0, b, i, choice, plan=MatchingPlan(),
                       _prepared=None):
    """Value of the i-th canonical fundamental solution at r_eval.

    Returns ``(value, diagnostics)``; the two-radius residual measures
    the difference of the r_m and r_m/2 seedings as a right multiplier.
    """
    prep = _prepared or prepare_nu(datum, a0, b, choice, plan)
    frame, ftype, gauge, r_m = prep["frame"], prep["ftype"], prep["gauge"], prep["r_match"]
    a0_mat, b_mat = prep["a0_mat"], prep["b_mat"]
    psi = frame.sector_arg(i)
    seed = _seed_value(datum, ftype, gauge, r_m, psi)
    value, stats = kernel.propagate(
        _ray_term(a0_mat, b_mat, r_m, plan.r_eval, psi), seed,
        rtol=plan.tol_ode, atol=plan.tol_ode * 1e-3, max_steps=plan.max_steps)
    diag = {"steps": stats, "r_match": r_m, "arg": psi}
    if plan.check_two_radius:
        seed_lo = _seed_value(datum, ftype, gauge, r_m / 2, psi)
        moved, _ = kernel.propagate(
            _ray_term(a0_mat, b_mat, r_m / 2, r_m, psi), seed_lo,
            rtol=plan.tol_ode, atol=plan.tol_ode * 1e-3, max_steps=plan.max_steps)
        resid = float(np.max(np.abs(np.linalg.solve(seed, moved) - np.eye(seed.shape[0]))))
        diag["match_residual"] = resid
        if resid > plan.tol_match:
            raise MatchingError(
                f"two-radius residual {resid:.3e} exceeds {plan.tol_match} "
                f"on sector {i} (r_m={r_m:.3g})")
    return value, diag


def prepare_nu(datum, a0, b, choice, plan):
    """Shared setup: diagram labeling, gauge series, matching radius."""
    a0 = a0 if isinstance(a0, CartanElement) else CartanElement(a0)
    diagram = anti_stokes(datum, a0, 2)
    frame = label_sectors(diagram, choice)
    m = datum.defining_dim
    work = plan.n_trunc + 1
    coeffs = np.zeros((work + 1, m, m), dtype=complex)
    coeffs[0] = datum.embed_cartan(a0)
    coeffs[1] = np.asarray(b, dtype=complex)
    germ = ConnectionGerm(k=2, coeffs=coeffs)
    ftype, gauge = formal_normalize(datum, germ, plan.n_trunc)
    r_m = plan.r_match if plan.r_match is not None else \
        pick_match_radius(datum, ftype, gauge, frame, plan)
    if not 0 < r_m < plan.r_eval <= 1.0:
        raise MatchingError(f"need 0 < r_match < r_eval <= 1, got "
                            f"{r_m} / {plan.r_eval}")
    return {"frame": frame, "ftype": ftype, "gauge": gauge, "r_match": r_m,
            "a0_mat": datum.embed_cartan(a0), "b_mat": np.asarray(b, dtype=complex)}


@dataclass(frozen=True)
class NuResult:
    stokes: StokesData
    gstar: GStarPoint
    frame: SectorFrame
    diagnostics: dict = field(repr=False)


def monodromy_map_nu(datum, a0, b, choice=None, plan=MatchingPlan()):
    """Stokes multipliers and the G* point of (A0/z^2 + B/z) dz.

    The default reference point sits on the negative imaginary axis
    with arg = 3 pi / 2.
    """
    choice = choice or SectorChoice(base_angle=1.5 * np.pi)
    prep = prepare_nu(datum, a0, b, choice, plan)
    frame = prep["frame"]
    ftype = prep["ftype"]
    lam = ftype.lam
    l = frame.diagram.l
    m = frame.n

    phi_l, d1 = canonical_solution(datum, a0, b, l, choice, plan, _prepared=prep)
    phi_2l, d2 = canonical_solution(datum, a0, b, m, choice, plan, _prepared=prep)
    psi_l = frame.sector_arg(l)
    psi_2l = frame.sector_arg(m)

    a0_mat, b_mat = prep["a0_mat"], prep["b_mat"]
    cont_l, s1s = kernel.propagate(
        _arc_term(a0_mat, b_mat, plan.r_eval, psi_l, psi_2l), phi_l,
        rtol=plan.tol_ode, atol=plan.tol_ode * 1e-3, max_steps=plan.max_steps)
    cont_2l, s2s = kernel.propagate(
        _arc_term(a0_mat, b_mat, plan.r_eval, psi_2l, psi_l + TWO_PI), phi_2l,
        rtol=plan.tol_ode, atol=plan.tol_ode * 1e-3, max_steps=plan.max_steps)

    s_minus = np.linalg.solve(phi_2l, cont_l)
    m0 = np.diag(np.exp(2j * np.pi * np.diagonal(datum.embed_cartan(lam))))
    s_plus = np.linalg.solve(phi_l, cont_2l) @ np.linalg.inv(m0)

    hp = half_periods(frame.diagram, frame.start)
    pos = hp[0][1]
    neg = hp[1][1]
    res_p = support_residual(datum, s_plus, set(pos))
    res_m = support_residual(datum, s_minus, set(neg))
    if max(res_p, res_m) > plan.tol_memb:
        raise ExtractionError(
            f"multiplier support residuals ({res_p:.3e}, {res_m:.3e}) exceed "
            f"{plan.tol_memb}; matching diagnostics: {d1}, {d2}")

    factors = multipliers_to_factors(datum, frame.diagram, (s_plus, s_minus),
                                     start=frame.start, tol_memb=plan.tol_memb)
    stokes = StokesData(factors=factors, multipliers=(s_plus, s_minus),
                        lam=lam, positive_roots=pos)
    point = gstar_from_stokes(datum, s_plus, s_minus, lam, positive=pos,
                              tol_memb=10 * plan.tol_memb)
    diagnostics = {
        "sector_low": d1, "sector_high": d2,
        "support_residual_plus": res_p, "support_residual_minus": res_m,
        "arc_steps": (s1s, s2s),
    }
    return NuResult(stokes=stokes, gstar=point, frame=frame,
                    diagnostics=diagnostics)


def direct_monodromy(datum, a0, b, radius=1.0, tol_ode=1e-9, base_angle=0.0,
                     max_steps=2_000_000):
    """Counterclockwise transport once around |z| = radius.

    The returned matrix is the left transport operator; its spectrum is
    basepoint independent and matches S_- S_+ e^{2 pi i Lambda}.
    """
    a0 = a0 if isinstance(a0, CartanElement) else CartanElement(a0)
    m = datum.defining_dim
    term = _arc_term(datum.embed_cartan(a0), np.asarray(b, dtype=complex),
                     radius, base_angle, base_angle + TWO_PI)
    y, stats = kernel.propagate(term, np.eye(m, dtype=complex),
                                rtol=tol_ode, atol=tol_ode * 1e-3,
                                max_steps=max_steps)
    return y, stats


def spectral_mismatch(m1, m2):
    """Greedy optimal pairing distance between two eigenvalue multisets."""
    ev1 = list(np.linalg.eigvals(m1))
    ev2 = list(np.linalg.eigvals(m2))
    worst = 0.0
    for a in ev1:
        j = int(np.argmin([abs(a - b) for b in ev2]))
        worst = max(worst, abs(a - ev2[j]))
        ev2.pop(j)
    return worst


def dagger_involution(datum, point):
    """(b_-, b_+, L) -> (b_+^{-dagger}, b_-^{-dagger}, -L^dagger) on G*."""
    bp = np.linalg.inv(point.b_plus.conj().T)
    bm = np.linalg.inv(point.b_minus.conj().T)
    lam = CartanElement(-np.conj(point.lam.coords))
    return GStarPoint(b_minus=bp, b_plus=bm, lam=lam, positive=point.positive)
