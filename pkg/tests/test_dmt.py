import numpy as np
import pytest

from gstokes.dmt import (
    adjoint_rep,
    build_dmt_form,
    classical_quantum_compare,
    defining_rep,
    dmt_flatness_check,
    dmt_holonomy,
    get_rep,
)
from gstokes.errors import CapabilityError, RegularityError
from gstokes.isomonodromy import TregPath, closed_rectangle
from gstokes.liealg import CartanElement, build_root_system, root_space_decompose

from conftest import rand_algebra, rand_cartan, rand_regular


def test_sl2_coefficient_matrix(sl2):
    datum, _ = sl2
    form = build_dmt_form(datum, "defining")
    assert form.coeff_mats.shape == (1, 2, 2)
    assert np.allclose(form.coeff_mats[0], np.eye(2))


def test_rank_one_flat(sl2, rng):
    datum, _ = sl2
    form = build_dmt_form(datum, "defining")
    res = dmt_flatness_check(form, datum, rand_regular(datum, rng),
                             rand_cartan(datum, rng), rand_cartan(datum, rng))
    assert res == 0.0


def test_adjoint_bracket_fidelity(sl3, rng):
    datum, basis = sl3
    rep = adjoint_rep(datum)
    assert rep.dimension == 8
    mats = [basis.e[i] for i in range(datum.n_roots)]
    mats += [datum.embed_cartan(np.eye(2)[j]) for j in range(2)]
    rhos = [rep.rho_e[i] for i in range(datum.n_roots)] + list(rep.rho_t)
    for x, rx in zip(mats, rhos):
        for y, ry in zip(mats, rhos):
            h, c = root_space_decompose(datum, x @ y - y @ x)
            target = sum(c[i] * rep.rho_e[i] for i in range(datum.n_roots))
            target = target + np.tensordot(h.coords, rep.rho_t, axes=1)
            assert np.max(np.abs((rx @ ry - ry @ rx) - target)) < 1e-12


def test_adjoint_coefficient_symmetry(sl3):
    # C_alpha in a K-orthonormal basis of the adjoint rep is symmetric
    datum, basis = sl3
    rep = adjoint_rep(datum)
    nr = datum.n_roots
    basis_mats = [basis.e[i] for i in range(nr)]
    basis_mats += [datum.embed_cartan(np.eye(2)[j]) for j in range(2)]
    gram = np.array([[np.trace(a @ b) for b in basis_mats] for a in basis_mats])
    evals, evecs = np.linalg.eigh((gram + gram.T.conj()) / 2)
    w = evecs @ np.diag(1 / np.sqrt(evals.astype(complex))) @ evecs.T
    form = build_dmt_form(datum, rep)
    for c in form.coeff_mats:
        sym = np.linalg.inv(w) @ c @ w
        assert np.max(np.abs(sym - sym.T)) < 1e-9


def test_rep_selection(sl2):
    datum, _ = sl2
    assert get_rep(datum, "defining").dimension == 2
    assert get_rep(datum, "adjoint").dimension == 3
    with pytest.raises(CapabilityError):
        get_rep(datum, "spin")


@pytest.mark.parametrize("family,rank", [("A", 1), ("A", 2), ("B", 2), ("C", 2),
                                         ("A", 3), ("B", 3), ("D", 3)])
def test_classical_quantum_identity(family, rank, rng):
    datum, basis = build_root_system(family, rank)
    for _ in range(50):
        a0 = rand_regular(datum, rng)
        v = rand_cartan(datum, rng)
        b = rand_algebra(datum, basis, rng)
        assert classical_quantum_compare(datum, a0, v, b) < 1e-11
    b = datum.embed_cartan(rand_cartan(datum, rng))
    assert classical_quantum_compare(datum, a0, v, b) < 1e-14
    with pytest.raises(RegularityError):
        classical_quantum_compare(datum, CartanElement(np.zeros(rank)), v, b)


@pytest.mark.parametrize("family,rank,rep", [("A", 2, "defining"), ("A", 2, "adjoint"),
                                             ("B", 2, "defining"), ("B", 2, "adjoint")])
def test_flatness(family, rank, rep, rng):
    datum, _ = build_root_system(family, rank)
    form = build_dmt_form(datum, rep)
    for _ in range(50):
        res = dmt_flatness_check(form, datum, rand_regular(datum, rng),
                                 rand_cartan(datum, rng), rand_cartan(datum, rng))
        assert res < 1e-10


def test_holonomy_zero_coupling(sl3):
    datum, _ = sl3
    form = build_dmt_form(datum, "defining", coupling=0.0)
    loop = closed_rectangle([2.0, 0.7], [0.2, 0.0], [0.0, 0.1j])
    y, _ = dmt_holonomy(form, datum, loop)
    assert np.max(np.abs(y - np.eye(3))) == 0.0


def test_holonomy_contractible_loop(sl3):
    datum, _ = sl3
    form = build_dmt_form(datum, "defining", coupling=0.4 + 0.2j)
    loop = closed_rectangle([2.0, 0.7], [0.25 + 0.1j, 0.0], [0.0, 0.15 - 0.1j])
    y, stats = dmt_holonomy(form, datum, loop, tol_ode=1e-10)
    assert np.max(np.abs(y - np.eye(3))) < 1e-7


def test_holonomy_composition(sl3):
    datum, _ = sl3
    form = build_dmt_form(datum, "defining", coupling=0.3)
    c = np.array([2.0, 0.7])
    du, dv = np.array([0.3, 0.0]), np.array([0.0, 0.2j])
    loop1 = closed_rectangle(c, du, dv)
    loop2 = closed_rectangle(c, 0.5 * du, -0.3 * dv)
    both = TregPath(pieces=loop1.pieces + loop2.pieces)
    y1, _ = dmt_holonomy(form, datum, loop1, tol_ode=1e-11)
    y2, _ = dmt_holonomy(form, datum, loop2, tol_ode=1e-11)
    y12, _ = dmt_holonomy(form, datum, both, tol_ode=1e-11)
    assert np.max(np.abs(y12 - y2 @ y1)) < 1e-7


def test_holonomy_requires_closed_loop(sl3):
    datum, _ = sl3
    from gstokes import kernel
    form = build_dmt_form(datum, "defining")
    open_path = TregPath(pieces=(kernel.LinePath(np.array([2.0, 0.7]),
                                                 np.array([2.5, 0.7])),))
    with pytest.raises(RegularityError):
        dmt_holonomy(form, datum, open_path)


def test_form_evaluation_linearity(sl3, rng):
    datum, _ = sl3
    form = build_dmt_form(datum, "defining", coupling=0.7)
    a0 = rand_regular(datum, rng)
    v1, v2 = rand_cartan(datum, rng), rand_cartan(datum, rng)
    lhs = form.evaluate(datum, a0, CartanElement(v1.coords + v2.coords))
    rhs = form.evaluate(datum, a0, v1) + form.evaluate(datum, a0, v2)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_braid_relation_of_holonomies():
    # transports along lifted generator loops satisfy the braid relation
    # (the two composite paths are homotopic off the walls; flatness does
    # the rest)
    datum, _ = build_root_system("A", 2)
    from gstokes import kernel
    from gstokes.isomonodromy import brieskorn_path
    from gstokes.liealg import weyl_reflection
    form = build_dmt_form(datum, "defining", coupling=0.04)
    base = CartanElement([2.0, 0.7])

    def weyl_map(word, coords):
        out = CartanElement(np.asarray(coords, dtype=complex))
        for i in word[::-1]:
            out = weyl_reflection(datum, i, out)
        return out.coords

    def transport(word):
        total = np.eye(3, dtype=complex)
        done = []
        for i in word:
            std = brieskorn_path(datum, i, base)
            pieces = []
            for piece in std.pieces:
                if isinstance(piece, kernel.LinePath):
                    pieces.append(kernel.LinePath(weyl_map(done, piece.start),
                                                  weyl_map(done, piece.end)))
                else:
                    w0 = weyl_map(done, piece.center)
                    wr = weyl_map(done, np.asarray(piece.center) + np.asarray(piece.ray)) - w0
                    pieces.append(kernel.ArcPath(w0, wr, piece.angle0, piece.angle1))
            term = lambda piece: kernel.CartanLinearTerm(
                path=piece, coeff_mats=form.coeff_mats, root_rows=form.root_rows,
                scale=form.coupling)
            y, _ = kernel.propagate_pieces(term, tuple(pieces),
                                           np.eye(3, dtype=complex),
                                           rtol=1e-11, atol=1e-14)
            total = y @ total
            done = done + [i]
        return total

    h121 = transport([1, 2, 1])
    h212 = transport([2, 1, 2])
    assert np.max(np.abs(h121 - h212)) < 1e-5
