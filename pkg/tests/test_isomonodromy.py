import numpy as np
import pytest

from gstokes.errors import GeometryError, RegularityError
from gstokes.isomonodromy import (
    TregPath,
    brieskorn_path,
    closed_rectangle,
    hamiltonian,
    hamiltonian_gradient,
    imd_vector_field,
    integrate_flow,
    lie_poisson_pairing,
    varpi_eval,
)
from gstokes.liealg import (
    CartanElement,
    build_root_system,
    invariant_form,
    root_space_decompose,
    weyl_reflection,
)

from conftest import rand_algebra, rand_cartan, rand_regular


def test_field_on_cartan_vanishes(sl3, rng):
    datum, _ = sl3
    b = datum.embed_cartan(rand_cartan(datum, rng))
    out = imd_vector_field(datum, b, rand_regular(datum, rng),
                           rand_cartan(datum, rng))
    assert np.max(np.abs(out)) < 1e-12


def test_field_sl2_example(sl2):
    datum, basis = sl2
    idx = datum.simple_index(1)
    b = basis.h[1] + basis.e[idx] + basis.f[1]
    out = imd_vector_field(datum, b, CartanElement([1.0]), CartanElement([1.0]))
    assert np.allclose(out, 2 * basis.e[idx] - 2 * basis.f[1])


def test_field_linear_in_direction(sl3, rng):
    datum, basis = sl3
    a0 = rand_regular(datum, rng)
    b = rand_algebra(datum, basis, rng)
    v1, v2 = rand_cartan(datum, rng), rand_cartan(datum, rng)
    lhs = imd_vector_field(datum, b, a0, CartanElement(v1.coords + v2.coords))
    rhs = imd_vector_field(datum, b, a0, v1) + imd_vector_field(datum, b, a0, v2)
    assert np.max(np.abs(lhs - rhs)) < 1e-11


def test_constant_path_and_cartan_fiber(sl3, rng):
    datum, basis = sl3
    from gstokes import kernel
    path = TregPath(pieces=(kernel.LinePath(np.array([2.0, 0.7]),
                                            np.array([2.0, 0.7])),))
    b0 = rand_algebra(datum, basis, rng)
    b1, _ = integrate_flow(datum, b0, path)
    assert np.max(np.abs(b1 - b0)) < 1e-12
    b0 = datum.embed_cartan(rand_cartan(datum, rng))
    b1, _ = integrate_flow(datum, b0, brieskorn_path(datum, 1, CartanElement([2.0, 0.7])))
    assert np.max(np.abs(b1 - b0)) < 1e-12


def test_brieskorn_sl2(sl2):
    datum, _ = sl2
    path = brieskorn_path(datum, 1, CartanElement([1.0]))
    assert len(path.pieces) == 3
    assert np.allclose(path.start().coords, [1.0])
    assert np.allclose(path.end().coords, [-1.0])
    # midpoint of the segment is the origin; semicircle sits around it
    arc = path.pieces[1]
    assert np.allclose(np.atleast_1d(arc.center), [0.0])


def test_brieskorn_phase_sweep(sl3):
    datum, _ = sl3
    for i in (1, 2):
        path = brieskorn_path(datum, i, CartanElement([2.0, 0.7]))
        idx = datum.simple_index(i)
        ts = np.linspace(0, 1, 41)
        vals = np.array([datum.root_value(
            idx, CartanElement(np.atleast_1d(path.pieces[1].at(t)[0]))) for t in ts])
        ph = np.unwrap(np.angle(vals))
        assert abs(ph[0]) < 1e-9 and abs(ph[-1] - np.pi) < 1e-9
        assert np.all(np.diff(ph) > 0)


def test_brieskorn_wall_clearance(sl3):
    datum, _ = sl3
    path = brieskorn_path(datum, 1, CartanElement([2.0, 0.7]))
    pts = path.points(65)
    for j in datum.positive_root_indices():
        if j == datum.simple_index(1):
            continue
        vals = pts @ np.asarray(datum.roots[j].coords)
        assert np.min(np.real(vals)) > 0
    with pytest.raises(GeometryError):
        brieskorn_path(datum, 1, CartanElement([2.0, 0.7]), eps=10.0)
    with pytest.raises(GeometryError):
        brieskorn_path(datum, 1, CartanElement([0.7, 2.0]))  # not dominant


def test_conservation_laws(rng):
    for family, rank in [("A", 1), ("A", 2), ("B", 2)]:
        datum, basis = build_root_system(family, rank)
        a0 = CartanElement(np.arange(rank, 0, -1) + 0.3)
        vals = [np.real(datum.root_value(i, a0)) for i in datum.positive_root_indices()]
        assert min(vals) > 0
        b0 = rand_algebra(datum, basis, rng, scale=0.4, cartan_scale=0.3)
        for i in range(1, rank + 1):
            path = brieskorn_path(datum, i, a0)
            b1, _ = integrate_flow(datum, b0, path, tol_ode=1e-10)
            ev0 = np.linalg.eigvals(b0)
            ev1 = np.linalg.eigvals(b1)
            from gstokes.stokes_numeric import spectral_mismatch
            assert spectral_mismatch(b0, b1) < 1e-9
            d0, _ = root_space_decompose(datum, b0)
            d1, _ = root_space_decompose(datum, b1)
            assert np.max(np.abs(d0.coords - d1.coords)) < 1e-9


def test_reversal(sl3, rng):
    datum, basis = sl3
    path = brieskorn_path(datum, 2, CartanElement([2.0, 0.7]))
    b0 = rand_algebra(datum, basis, rng)
    b1, _ = integrate_flow(datum, b0, path, tol_ode=1e-10)
    b2, _ = integrate_flow(datum, b1, path.reversed(), tol_ode=1e-10)
    assert np.max(np.abs(b2 - b0)) < 1e-9


def test_flatness_small_rectangles(rng):
    for family, rank in [("A", 1), ("A", 2)]:
        datum, basis = build_root_system(family, rank)
        corner = np.arange(rank, 0, -1) + 0.3
        b0 = rand_algebra(datum, basis, rng)
        du = 0.3 * (rng.normal(size=rank) + 1j * rng.normal(size=rank)) * 0.5
        dv = 0.3 * (rng.normal(size=rank) + 1j * rng.normal(size=rank)) * 0.5
        loop = closed_rectangle(corner, du, dv)
        if loop.regularity_margin(datum) < 0.3:
            continue
        b1, _ = integrate_flow(datum, b0, loop, tol_ode=1e-10)
        assert np.max(np.abs(b1 - b0)) < 1e-8


def test_margin_guard(sl2, rng):
    datum, basis = sl2
    from gstokes import kernel
    path = TregPath(pieces=(kernel.LinePath(np.array([1.0]), np.array([-1.0])),))
    with pytest.raises(RegularityError):
        integrate_flow(datum, rand_algebra(datum, basis, rng), path)


def test_hamiltonian_values(sl2):
    datum, basis = sl2
    idx = datum.simple_index(1)
    for bb, cc in [(0.7, -0.3), (1.2 + 0.1j, 0.5)]:
        b = basis.h[1] + bb * basis.e[idx] + cc * basis.f[1]
        val = hamiltonian(datum, CartanElement([1.0]), b, CartanElement([1.0]))
        assert abs(val - 2 * bb * cc) < 1e-12
    b = datum.embed_cartan(CartanElement([0.4]))
    assert abs(varpi_eval(datum, CartanElement([1.0]), b, CartanElement([1.0]))) < 1e-14


def test_hamiltonian_torus_invariance(sl3, rng):
    datum, basis = sl3
    a0 = rand_regular(datum, rng)
    v = rand_cartan(datum, rng)
    b = rand_algebra(datum, basis, rng)
    t = np.diag(np.exp(np.diagonal(datum.embed_cartan(rand_cartan(datum, rng, 0.5)))))
    b_t = t @ b @ np.linalg.inv(t)
    h1 = hamiltonian(datum, v, b, a0)
    h2 = hamiltonian(datum, v, b_t, a0)
    assert abs(h1 - h2) < 1e-10 * max(1, abs(h1))


def test_poisson_bracket_reproduces_flow(sl3, rng):
    datum, basis = sl3
    a0 = rand_regular(datum, rng)
    v = rand_cartan(datum, rng)
    for _ in range(10):
        b = rand_algebra(datum, basis, rng)
        x = rand_algebra(datum, basis, rng)    # gradient of f = K(., X)
        lhs = invariant_form(imd_vector_field(datum, b, a0, v), x)
        rhs = lie_poisson_pairing(datum, b, hamiltonian_gradient(datum, v, b, a0), x)
        assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(lhs))
