import numpy as np
import pytest

from gstokes.liealg import CartanElement, build_root_system
from gstokes.gstar import gstar_from_stokes
from gstokes.liealg import unipotent_exp

SUPPORTED = [("A", 1), ("A", 2), ("A", 3), ("A", 4),
             ("B", 1), ("B", 2), ("B", 3), ("B", 4),
             ("C", 1), ("C", 2), ("C", 3), ("C", 4),
             ("D", 2), ("D", 3), ("D", 4)]

RANK2 = [("A", 2), ("B", 2), ("C", 2)]


def rand_cartan(datum, rng, scale=1.0):
    return CartanElement((rng.normal(size=datum.rank)
                          + 1j * rng.normal(size=datum.rank)) * scale)


def rand_regular(datum, rng, margin=0.25, scale=1.0):
    while True:
        h = rand_cartan(datum, rng, scale)
        if min(abs(datum.root_value(i, h)) for i in range(datum.n_roots)) > margin:
            return h


def rand_algebra(datum, basis, rng, scale=0.6, cartan_scale=0.4):
    x = datum.embed_cartan(rand_cartan(datum, rng, cartan_scale))
    for i in range(datum.n_roots):
        x = x + (rng.normal() + 1j * rng.normal()) * scale * basis.e[i]
    return x


def rand_unipotent(datum, basis, rng, positive=True, scale=0.4):
    out = np.eye(datum.defining_dim, dtype=complex)
    for i in datum.positive_root_indices():
        idx = i if positive else datum.negation[i]
        out = out @ unipotent_exp((rng.normal() + 1j * rng.normal()) * scale
                                  * basis.e[idx])
    return out


def rand_gstar(datum, basis, rng, scale=0.4, lam_scale=0.15):
    sp = rand_unipotent(datum, basis, rng, True, scale)
    sm = rand_unipotent(datum, basis, rng, False, scale)
    lam = rand_cartan(datum, rng, lam_scale)
    return gstar_from_stokes(datum, sp, sm, lam)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=SUPPORTED, ids=[f"{f}{r}" for f, r in SUPPORTED])
def any_datum(request):
    return build_root_system(*request.param)


@pytest.fixture
def sl2():
    return build_root_system("A", 1)


@pytest.fixture
def sl3():
    return build_root_system("A", 2)
