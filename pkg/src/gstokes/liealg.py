"""Classical root systems and their defining matrix realizations.

Families A, B, C, D at ranks 1..4 are realized so that the Cartan
subalgebra is diagonal and all positive root vectors are strictly upper
triangular.  For B/C/D the realization is cut out by an anti-diagonal
form J (X^T J + J X = 0), which is what makes the standard Borel
upper triangular and big-cell factorization a plain LDU.

Conventions:
  * Cartan coordinates are the first ``rank`` diagonal entries
    (for A_n the last entry is minus their sum).
  * Root vectors e_alpha are normalized so that [e_alpha, e_{-alpha}]
    equals the coroot h_alpha for every positive alpha.
  * The invariant form is the trace form of the defining representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, CellError, MembershipError, RegularityError

TOL_GRP = 1e-10
TOL_DEC = 1e-10
TOL_REG = 1e-8
TOL_CELL = 1e-12

_ROOT_COUNT = {
    "A": lambda n: n * (n + 1),
    "B": lambda n: 2 * n * n,
    "C": lambda n: 2 * n * n,
    "D": lambda n: 2 * n * (n - 1),
}


@dataclass(frozen=True)
class Root:
    """A root as an integer linear functional on Cartan coordinates."""

    index: int
    coords: tuple

    def value(self, h_coords):
        return sum(c * x for c, x in zip(self.coords, h_coords))


@dataclass(frozen=True)
class CartanElement:
    """Element of the Cartan subalgebra, stored in coordinate form."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords",
                           np.asarray(self.coords, dtype=complex))


@dataclass(frozen=True)
class ChevalleyBasis:
    """Root vectors for every root plus the simple coroot matrices.

    ``e[i]`` is the matrix of the root with index i (all roots, both
    signs); ``f[j]`` and ``h[j]`` are the negative root vector and the
    coroot of the j-th simple root.
    """

    e: dict
    f: dict
    h: dict


@dataclass(frozen=True)
class RootDatum:
    family: str
    rank: int
    defining_dim: int
    roots: tuple
    simple_roots: tuple          # indices into ``roots``
    cartan_matrix: np.ndarray
    form_on_t: np.ndarray        # Gram matrix of the trace form on coordinates
    j_form: np.ndarray | None    # anti-diagonal form for B/C/D, None for A
    negation: tuple              # index of -alpha for each root index
    coroots: tuple               # CartanElement coords of h_alpha, per root
    _basis: ChevalleyBasis = field(repr=False)
    _dual: np.ndarray = field(repr=False)      # (R + rank, m, m) extraction functionals
    _embed_rows: np.ndarray = field(repr=False)  # (m, rank) diagonal embedding

    # -- Cartan embedding ------------------------------------------------

    @property
    def n_roots(self):
        return len(self.roots)

    def embed_cartan(self, h) -> np.ndarray:
        """Diagonal matrix of a CartanElement (or raw coords)."""
        coords = h.coords if isinstance(h, CartanElement) else np.asarray(h, dtype=complex)
        return np.diag(self._embed_rows @ coords)

    def cartan_from_matrix(self, mat) -> CartanElement:
        """Coordinates of the Cartan part of a diagonal-dominant matrix."""
        d = np.diagonal(mat)
        coords, *_ = np.linalg.lstsq(self._embed_rows, d, rcond=None)
        return CartanElement(coords)

    def root_value(self, root_index, h) -> complex:
        coords = h.coords if isinstance(h, CartanElement) else np.asarray(h, dtype=complex)
        return complex(np.dot(self.roots[root_index].coords, coords))

    # -- root / basis access ---------------------------------------------

    @property
    def basis(self) -> ChevalleyBasis:
        return self._basis

    def root_index(self, coords) -> int:
        key = tuple(int(round(c)) for c in coords)
        for r in self.roots:
            if r.coords == key:
                return r.index
        raise KeyError(f"not a root: {coords}")

    def positive_root_indices(self):
        """Roots positive for the standard (upper-triangular) Borel."""
        return tuple(i for i in range(self.n_roots) if self._is_std_positive(i))

    def _is_std_positive(self, i):
        e = self._basis.e[i]
        rows, cols = np.nonzero(np.abs(e) > 1e-14)
        return bool(np.all(rows < cols))

    def simple_index(self, j) -> int:
        """Root index of the j-th simple root (j = 1..rank)."""
        if not 1 <= j <= self.rank:
            raise CapabilityError(f"simple root index {j} out of range 1..{self.rank}")
        return self.simple_roots[j - 1]

    def form_dual(self, alpha_coords, beta_coords) -> complex:
        """Induced trace-form pairing of two weights (root functionals)."""
        ginv = np.linalg.inv(self.form_on_t)
        return complex(np.asarray(alpha_coords, float) @ ginv @ np.asarray(beta_coords, float))

    def norm2(self, root_index) -> float:
        a = self.roots[root_index].coords
        return float(np.real(self.form_dual(a, a)))

    # -- regularity --------------------------------------------------------

    def check_regular(self, a0, tol=TOL_REG):
        for r in self.roots:
            if abs(r.value(np.asarray(a0.coords if isinstance(a0, CartanElement) else a0))) <= tol:
                raise RegularityError(
                    f"element is within {tol} of the wall of root {r.coords}")


def _build_A(rank):
    m = rank + 1
    embed = np.zeros((m, rank))
    embed[:rank, :] = np.eye(rank)
    embed[rank, :] = -1.0
    # functional eps_i on coordinates
    eps = [embed[i] for i in range(m)]
    roots, vectors = [], []
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            roots.append(tuple(int(round(c)) for c in (eps[i] - eps[j])))
            vec = np.zeros((m, m), dtype=complex)
            vec[i, j] = 1.0
            vectors.append(vec)
    simple = [tuple(int(round(c)) for c in (eps[i] - eps[i + 1])) for i in range(rank)]
    return m, None, roots, vectors, simple


def _build_BCD(family, rank):
    if family == "B":
        m = 2 * rank + 1
    else:
        m = 2 * rank
    bar = lambda i: m - 1 - i
    if family == "C":
        sgn = np.array([1.0] * rank + [-1.0] * rank)
    else:
        sgn = np.ones(m)
    J = np.zeros((m, m))
    for i in range(m):
        J[i, bar(i)] = sgn[i]
    embed = np.zeros((m, rank))
    for i in range(rank):
        embed[i, i] = 1.0
        embed[bar(i), i] = -1.0
    eps = np.eye(rank)

    roots, vectors = [], []

    def add(coords, mat):
        roots.append(tuple(int(round(c)) for c in coords))
        vectors.append(mat.astype(complex))

    def E(i, j):
        out = np.zeros((m, m))
        out[i, j] = 1.0
        return out

    for i in range(rank):
        for j in range(rank):
            if i != j:
                add(eps[i] - eps[j], E(i, j) - E(bar(j), bar(i)))
    for i in range(rank):
        for j in range(i + 1, rank):
            if family == "C":
                add(eps[i] + eps[j], E(i, bar(j)) + E(j, bar(i)))
                add(-eps[i] - eps[j], E(bar(j), i) + E(bar(i), j))
            else:
                add(eps[i] + eps[j], E(i, bar(j)) - E(j, bar(i)))
                add(-eps[i] - eps[j], E(bar(j), i) - E(bar(i), j))
    if family == "B":
        mid = rank
        for i in range(rank):
            add(eps[i], E(i, mid) - E(mid, bar(i)))
            add(-eps[i], 2.0 * (E(mid, i) - E(bar(i), mid)))
    if family == "C":
        for i in range(rank):
            add(2 * eps[i], E(i, bar(i)))
            add(-2 * eps[i], E(bar(i), i))

    if family == "B":
        simple = [tuple(int(c) for c in (eps[i] - eps[i + 1]))
                  for i in range(rank - 1)] + [tuple(int(c) for c in eps[rank - 1])]
    elif family == "C":
        simple = [tuple(int(c) for c in (eps[i] - eps[i + 1]))
                  for i in range(rank - 1)] + [tuple(int(c) for c in 2 * eps[rank - 1])]
    else:
        simple = [tuple(int(c) for c in (eps[i] - eps[i + 1]))
                  for i in range(rank - 1)] + [tuple(int(c) for c in (eps[rank - 2] + eps[rank - 1]))]
    return m, J, roots, vectors, simple


@lru_cache(maxsize=None)
def build_root_system(family, rank):
    """Construct the root datum and Chevalley basis of a classical family.

    Returns ``(RootDatum, ChevalleyBasis)``.  Supported: A/B/C rank 1..4,
    D rank 2..4 (D_1 has no roots).
    """
    if family not in "ABCD":
        raise CapabilityError(f"unknown family {family!r}")
    if not 1 <= rank <= 4 or (family == "D" and rank < 2):
        raise CapabilityError(f"{family}{rank} is not supported (A/B/C 1..4, D 2..4)")

    if family == "A":
        m, J, root_coords, vectors, simple = _build_A(rank)
        embed = np.zeros((m, rank))
        embed[:rank, :] = np.eye(rank)
        embed[rank, :] = -1.0
    else:
        m, J, root_coords, vectors, simple = _build_BCD(family, rank)
        bar = lambda i: m - 1 - i
        embed = np.zeros((m, rank))
        for i in range(rank):
            embed[i, i] = 1.0
            embed[bar(i), i] = -1.0

    roots = tuple(Root(i, rc) for i, rc in enumerate(root_coords))
    index_of = {rc: i for i, rc in enumerate(root_coords)}
    negation = tuple(index_of[tuple(-c for c in rc)] for rc in root_coords)

    e = {i: vectors[i] for i in range(len(roots))}

    # normalize so [e_a, e_{-a}] is the coroot, for every positive root
    gram = embed.T @ embed  # trace form on coordinates
    ginv = np.linalg.inv(gram)

    def dual_pair(a, b):
        return float(np.asarray(a, float) @ ginv @ np.asarray(b, float))

    coroots = [None] * len(roots)
    for i, r in enumerate(roots):
        a = np.asarray(r.coords, float)
        coroots[i] = tuple(2.0 * (ginv @ a) / dual_pair(a, a))
    coroots = tuple(coroots)

    simple_idx = tuple(index_of[s] for s in simple)
    n = rank
    cartan = np.zeros((n, n), dtype=int)
    for a in range(n):
        for b in range(n):
            ra = np.asarray(simple[a], float)
            rb = np.asarray(simple[b], float)
            cartan[a, b] = int(round(2 * dual_pair(ra, rb) / dual_pair(rb, rb)))

    f = {j + 1: e[negation[simple_idx[j]]] for j in range(rank)}
    h = {j + 1: np.diag(embed @ np.asarray(coroots[simple_idx[j]], float)).astype(complex)
         for j in range(rank)}

    # dual functionals: coordinates of X in the basis (e_roots..., t-basis)
    cols = [vectors[i].ravel() for i in range(len(roots))]
    for j in range(rank):
        cols.append(np.diag(embed[:, j]).astype(complex).ravel())
    V = np.stack(cols, axis=1)
    dual = np.linalg.pinv(V)
    dual_mats = dual.reshape(len(cols), m, m)

    basis = ChevalleyBasis(e=e, f=f, h=h)
    datum = RootDatum(
        family=family, rank=rank, defining_dim=m, roots=roots,
        simple_roots=simple_idx, cartan_matrix=cartan, form_on_t=gram,
        j_form=J, negation=negation, coroots=coroots,
        _basis=basis, _dual=dual_mats, _embed_rows=embed,
    )
    return datum, basis


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def invariant_form(x, y) -> complex:
    """Trace form Tr(XY) of the defining representation."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise MembershipError(f"dimension mismatch {x.shape} vs {y.shape}")
    return complex(np.trace(x @ y))


def check_algebra_membership(datum, x, tol=TOL_DEC):
    """Residual of X against the realization (J-condition, or trace for A)."""
    x = np.asarray(x, dtype=complex)
    if datum.j_form is None:
        return abs(np.trace(x))
    J = datum.j_form
    return float(np.max(np.abs(x.T @ J + J @ x)))


def check_group_membership(datum, g, tol=TOL_GRP):
    """Residual of g against unit determinant (A) or g^T J g = J (B/C/D)."""
    g = np.asarray(g, dtype=complex)
    if datum.j_form is None:
        return abs(np.linalg.det(g) - 1.0)
    J = datum.j_form
    return float(np.max(np.abs(g.T @ J @ g - J)))


def root_space_project(datum, x):
    """Best root-space coordinates of X plus the off-algebra residual."""
    x = np.asarray(x, dtype=complex)
    coeffs = np.einsum("aij,ij->a", datum._dual, x)
    nr = datum.n_roots
    recon = np.zeros_like(x)
    for i in range(nr):
        recon = recon + coeffs[i] * datum.basis.e[i]
    h = CartanElement(coeffs[nr:])
    recon = recon + datum.embed_cartan(h)
    err = float(np.max(np.abs(recon - x)))
    return h, {i: complex(coeffs[i]) for i in range(nr)}, err


def root_space_decompose(datum, x, tol=TOL_DEC):
    """Write X = H + sum c_alpha e_alpha; returns (CartanElement, {index: c})."""
    h, coeffs, err = root_space_project(datum, x)
    if err > tol * max(1.0, float(np.max(np.abs(x)))):
        raise MembershipError(f"matrix is not in the algebra (residual {err:.2e})")
    return h, coeffs


def ad_inverse_offdiag(datum, a0, x, tol_reg=TOL_REG, tol_dec=TOL_DEC):
    """Solve [A0, Y] = X for off-diagonal X, with A0 regular."""
    datum.check_regular(a0, tol_reg)
    h, c = root_space_decompose(datum, x)
    scale = max(1.0, float(np.max(np.abs(x))))
    if float(np.max(np.abs(h.coords), initial=0.0)) > tol_dec * scale:
        raise MembershipError("input has a nonzero Cartan component")
    out = np.zeros((datum.defining_dim, datum.defining_dim), dtype=complex)
    for i, ci in c.items():
        if ci != 0:
            out = out + (ci / datum.root_value(i, a0)) * datum.basis.e[i]
    return out


def positive_system_from_regular(datum, lam, tol_reg=TOL_REG):
    """Root indices alpha with alpha(lam) > 0, for real regular lam."""
    coords = np.real(lam.coords if isinstance(lam, CartanElement) else np.asarray(lam))
    vals = [r.value(coords) for r in datum.roots]
    if min(abs(v) for v in vals) <= tol_reg:
        raise RegularityError("element lies on a wall")
    return tuple(i for i, v in enumerate(vals) if v > 0)


def weyl_reflection(datum, i, h) -> CartanElement:
    """Simple reflection s_i acting on a Cartan element."""
    idx = datum.simple_index(i)
    coords = h.coords if isinstance(h, CartanElement) else np.asarray(h, dtype=complex)
    val = datum.root_value(idx, coords)
    return CartanElement(coords - val * np.asarray(datum.coroots[idx]))


def weyl_word_apply(datum, word, h) -> CartanElement:
    out = h if isinstance(h, CartanElement) else CartanElement(h)
    for i in word:
        out = weyl_reflection(datum, abs(i), out)
    return out


def unipotent_exp(x, tol=1e-7) -> np.ndarray:
    """exp of a nilpotent matrix by its (finite) power series.

    ``tol`` is a coarse guard against grossly non-nilpotent input; it is
    scaled by the power growth of the entries, so both machine roundoff
    and integration-level noise on genuine nilpotents pass through.
    """
    x = np.asarray(x, dtype=complex)
    m = x.shape[0]
    out = np.eye(m, dtype=complex)
    term = np.eye(m, dtype=complex)
    for j in range(1, m + 1):
        term = term @ x / j
        out = out + term
    floor = max(1.0, float(np.max(np.abs(x)))) ** (m + 1)
    if np.max(np.abs(term @ x)) > tol * floor:
        raise MembershipError("matrix is not nilpotent")
    return out


def unipotent_log(u, tol=1e-7) -> np.ndarray:
    """log of a unipotent matrix by the finite Mercator series."""
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    x = u - np.eye(m)
    out = np.zeros_like(x)
    term = np.eye(m, dtype=complex)
    for j in range(1, m + 1):
        term = term @ x
        out = out + ((-1) ** (j + 1) / j) * term
    floor = max(1.0, float(np.max(np.abs(x)))) ** (m + 1)
    if np.max(np.abs(term @ x)) > tol * floor:
        raise MembershipError("matrix is not unipotent")
    return out


def big_cell_factorize(g, tol_cell=TOL_CELL, frame=None):
    """Unique factorization g = u_minus . t . u_plus over the big cell.

    ``frame`` optionally conjugates a non-standard Borel pair into
    triangular position before the pivoted elimination and back after.
    """
    g = np.asarray(g, dtype=complex)
    if frame is not None:
        g = np.linalg.solve(frame, g @ frame)
    m = g.shape[0]
    scale = max(1.0, float(np.max(np.abs(g))))
    lo = np.eye(m, dtype=complex)
    up = np.eye(m, dtype=complex)
    a = g.copy()
    d = np.zeros(m, dtype=complex)
    for kcol in range(m):
        piv = a[kcol, kcol]
        if abs(piv) <= tol_cell * scale:
            raise CellError(f"pivot {kcol} below tolerance: |{piv:.3e}|")
        d[kcol] = piv
        lo[kcol + 1:, kcol] = a[kcol + 1:, kcol] / piv
        up[kcol, kcol + 1:] = a[kcol, kcol + 1:] / piv
        a[kcol + 1:, kcol + 1:] -= np.outer(a[kcol + 1:, kcol], a[kcol, kcol + 1:]) / piv
    t = np.diag(d)
    if frame is not None:
        lo = frame @ lo @ np.linalg.inv(frame)
        t = frame @ t @ np.linalg.inv(frame)
        up = frame @ up @ np.linalg.inv(frame)
    return lo, t, up
