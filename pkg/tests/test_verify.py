import numpy as np

from gstokes import serialize
from gstokes.formal import ConnectionGerm
from gstokes.isomonodromy import brieskorn_path
from gstokes.liealg import CartanElement, build_root_system
from gstokes.verify import (
    RunConfig,
    default_dominant,
    theorem_residuals,
    verify_theorem_holonomy,
)

from conftest import rand_algebra, rand_gstar


def test_default_dominant(any_datum):
    datum, _ = any_datum
    a0 = default_dominant(datum)
    vals = [np.real(datum.root_value(i, a0)) for i in datum.positive_root_indices()]
    assert min(vals) > 0


def test_single_pipeline_sl2(rng):
    datum, basis = build_root_system("A", 1)
    b0 = rand_algebra(datum, basis, rng, 0.4, 0.25)
    out = theorem_residuals(datum, basis, CartanElement([1.0]), b0, 1)
    assert out["multiplier_formulas"] < 1e-5
    assert out["holonomy_twist"] < 1e-5
    assert out["braid_inversion"] < 1e-5


def test_report_structure():
    report = verify_theorem_holonomy(RunConfig(family="A", rank=1, seed=3,
                                               n_samples=2))
    assert report["check"] == "theorem_holonomy"
    assert report["pass"] is True
    assert len(report["samples"]) == 2
    assert {"sample", "generator", "residual", "pass"} <= set(report["samples"][0])


def test_trivial_cartan_residue():
    # a torus-valued residue gives identity multipliers; every stage is exact
    datum, basis = build_root_system("A", 1)
    b0 = datum.embed_cartan(CartanElement([0.21]))
    out = theorem_residuals(datum, basis, CartanElement([1.0]), b0, 1)
    assert out["multiplier_formulas"] < 1e-7


def test_serialize_round_trips(rng):
    datum, basis = build_root_system("A", 2)
    m = rand_algebra(datum, basis, rng)
    assert np.max(np.abs(serialize.mat_from_json(serialize.mat_to_json(m)) - m)) == 0

    p = rand_gstar(datum, basis, rng)
    q = serialize.gstar_from_json(serialize.gstar_to_json(p))
    assert np.max(np.abs(q.b_minus - p.b_minus)) == 0
    assert np.max(np.abs(q.lam.coords - p.lam.coords)) == 0

    coeffs = np.stack([rand_algebra(datum, basis, rng) for _ in range(4)])
    germ = ConnectionGerm(k=2, coeffs=coeffs)
    g2 = serialize.germ_from_json(serialize.germ_to_json(germ))
    assert g2.k == 2
    assert np.max(np.abs(g2.coeffs - coeffs)) == 0

    path = brieskorn_path(datum, 1, CartanElement([2.0, 0.7]))
    p2 = serialize.path_from_json(serialize.path_to_json(path))
    assert len(p2.pieces) == 3
    assert np.max(np.abs(p2.end().coords - path.end().coords)) == 0
