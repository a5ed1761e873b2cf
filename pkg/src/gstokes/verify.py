"""End-to-end verification that braid holonomy matches the explicit action.

The pipeline: compute Stokes data of (A0*/z^2 + B0/z) dz at a real
dominant base point with the reference point on the negative imaginary
axis (arg = 3 pi/2), transport B0 along a generator loop, recompute the
Stokes data at the reflected base point, and compare three ways:

  * the multiplier-level transition formulas,
  * the torus-normalizer twist against the holonomy generator on G*,
  * the explicit braid generator, which must undo the whole trip.

Each stage reports its residual; a stage failure is attributed, not
swallowed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GStokesError
from .gstar import (
    dkp_generator,
    gamma_action,
    gstar_from_stokes,
    holonomy_generator,
    holonomy_generator_stokes,
    tits_generator,
)
from .isomonodromy import brieskorn_path, integrate_flow
from .liealg import CartanElement, build_root_system, weyl_reflection
from .stokes_geometry import SectorChoice
from .stokes_numeric import MatchingPlan, monodromy_map_nu

REFERENCE_CHOICE = SectorChoice(base_angle=1.5 * np.pi)


@dataclass
class RunConfig:
    family: str = "A"
    rank: int = 1
    seed: int = 0
    tol_ode: float = 1e-9
    tol_verify: float = 1e-5
    n_samples: int = 10
    # residue scale of the sampled connections; Stokes multiplier entries
    # grow exponentially with it and absolute residuals grow with their
    # square, so desk-scale verification keeps it moderate
    b_scale: float = 0.35
    out_format: str = "json"
    out_path: str | None = None


def random_algebra_element(datum, basis, rng, scale=0.5, cartan_scale=0.3):
    x = datum.embed_cartan(CartanElement(
        (rng.normal(size=datum.rank) + 1j * rng.normal(size=datum.rank)) * cartan_scale))
    for i in range(datum.n_roots):
        x = x + (rng.normal() + 1j * rng.normal()) * scale * basis.e[i]
    return x


def default_dominant(datum):
    """A convenient real dominant regular base point."""
    coords = np.array([datum.rank - j + 0.3 * (j % 2) for j in range(datum.rank)],
                      dtype=float)
    vals = [np.real(datum.root_value(i, CartanElement(coords)))
            for i in datum.positive_root_indices()]
    assert min(vals) > 0
    return CartanElement(coords)


def theorem_residuals(datum, basis, a0_star, b0, i, tol_ode=1e-9, plan=None):
    """Residuals of the three comparison stages for one generator loop."""
    plan = plan or MatchingPlan(tol_ode=tol_ode)
    stage = "stokes data at base point"
    try:
        r0 = monodromy_map_nu(datum, a0_star, b0, choice=REFERENCE_CHOICE, plan=plan)
        sp, sm, lam = r0.stokes.multipliers[0], r0.stokes.multipliers[1], r0.stokes.lam

        stage = "deformation flow"
        path = brieskorn_path(datum, i, a0_star)
        b1, flow_stats = integrate_flow(datum, b0, path, tol_ode=tol_ode / 10)

        stage = "stokes data at reflected point"
        a0_prime = weyl_reflection(datum, i, a0_star)
        r1 = monodromy_map_nu(datum, a0_prime, b1, choice=REFERENCE_CHOICE, plan=plan)
        sp1, sm1, lam1 = r1.stokes.multipliers[0], r1.stokes.multipliers[1], r1.stokes.lam

        stage = "multiplier transition formulas"
        sp_pred, sm_pred, _ = holonomy_generator_stokes(datum, i, sp, sm, lam,
                                                        tol_memb=plan.tol_memb)
        res_mult = max(float(np.max(np.abs(sp_pred - sp1))),
                       float(np.max(np.abs(sm_pred - sm1))),
                       float(np.max(np.abs(lam1.coords - lam.coords))))

        stage = "torus-normalizer twist"
        ti = tits_generator(datum, i)
        sp2, sm2, lam2 = gamma_action(datum, np.linalg.inv(ti.matrix), sp1, sm1, lam1)
        q_meas = gstar_from_stokes(datum, sp2, sm2, lam2,
                                   tol_memb=10 * plan.tol_memb)
        q_pred = holonomy_generator(datum, i, r0.gstar, tol_memb=plan.tol_memb)
        res_hol = max(float(np.max(np.abs(q_meas.b_minus - q_pred.b_minus))),
                      float(np.max(np.abs(q_meas.b_plus - q_pred.b_plus))),
                      float(np.max(np.abs(q_meas.lam.coords - q_pred.lam.coords))))

        stage = "explicit braid generator inversion"
        back = dkp_generator(datum, i, q_meas, tol_memb=plan.tol_memb)
        res_dkp = max(float(np.max(np.abs(back.b_minus - r0.gstar.b_minus))),
                      float(np.max(np.abs(back.b_plus - r0.gstar.b_plus))),
                      float(np.max(np.abs(back.lam.coords - r0.gstar.lam.coords))))
    except GStokesError as exc:
        raise GStokesError(f"stage '{stage}' failed: {exc}") from exc
    return {
        "multiplier_formulas": res_mult,
        "holonomy_twist": res_hol,
        "braid_inversion": res_dkp,
        "flow_steps": flow_stats["n_accept"],
    }


def verify_theorem_holonomy(config: RunConfig):
    """Run the holonomy comparison over seeded samples; returns a report."""
    datum, basis = build_root_system(config.family, config.rank)
    rng = np.random.default_rng(config.seed)
    a0_star = default_dominant(datum)
    # higher rank spreads the root values of A0*, so the gauge series needs
    # more headroom before the seeding error drops below the target
    n_trunc = 12 if config.rank == 1 else 20
    plan = MatchingPlan(tol_ode=config.tol_ode, n_trunc=n_trunc)
    samples = []
    ok = True
    for n in range(config.n_samples):
        b0 = random_algebra_element(datum, basis, rng, scale=config.b_scale,
                                    cartan_scale=0.6 * config.b_scale)
        i = 1 + n % datum.rank
        entry = {"sample": n, "generator": i}
        try:
            res = theorem_residuals(datum, basis, a0_star, b0, i,
                                    tol_ode=config.tol_ode, plan=plan)
            entry.update(res)
            entry["residual"] = max(res["multiplier_formulas"],
                                    res["holonomy_twist"], res["braid_inversion"])
            entry["pass"] = bool(entry["residual"] < config.tol_verify)
        except GStokesError as exc:
            entry["error"] = str(exc)
            entry["pass"] = False
        ok = ok and entry["pass"]
        samples.append(entry)
    return {
        "check": "theorem_holonomy",
        "family": config.family,
        "rank": config.rank,
        "seed": config.seed,
        "tol_verify": config.tol_verify,
        "base_point": [float(x) for x in np.real(a0_star.coords)],
        "samples": samples,
        "pass": ok,
    }
