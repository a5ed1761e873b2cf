"""Path and right-hand-side descriptions consumed by the stepping kernel.

A term bundles one path piece (line or arc, in C or in Cartan
coordinates C^r) with one of three vector fields:

  * ``ConnectionTerm``  -- dY = dz (sum_j z^{p_j} M_j) Y  along z(t),
  * ``CartanLinearTerm``-- dY = h (sum_a  (a.g')/(a.g) C_a) Y  along g(t),
  * ``IMDTerm``         -- dY = [Y, sum_a (a.g')/(a.g) <W_a, Y> E_a].

Both kernel lanes (Cython and numpy) interpret exactly this data, so a
term is the unit of parity between them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LINE = 0
ARC = 1

CONNECTION = 0
CARTAN_LINEAR = 1
IMD = 2


@dataclass(frozen=True)
class LinePath:
    """g(t) = start + (end - start) t, t in [0, 1]."""

    start: np.ndarray
    end: np.ndarray

    def at(self, t):
        s = np.asarray(self.start, dtype=complex)
        e = np.asarray(self.end, dtype=complex)
        return s + (e - s) * t, (e - s) * np.ones_like(t)

    def pack(self):
        s = np.atleast_1d(np.asarray(self.start, dtype=complex))
        e = np.atleast_1d(np.asarray(self.end, dtype=complex))
        return LINE, np.concatenate([s, e - s])


@dataclass(frozen=True)
class ArcPath:
    """g(t) = center + ray * exp(i (a0 + (a1 - a0) t)), t in [0, 1].

    ``ray`` may be a vector, tracing a circular arc inside a complex line.
    """

    center: np.ndarray
    ray: np.ndarray
    angle0: float
    angle1: float

    def at(self, t):
        c = np.asarray(self.center, dtype=complex)
        u = np.asarray(self.ray, dtype=complex)
        da = self.angle1 - self.angle0
        ph = np.exp(1j * (self.angle0 + da * t))
        return c + u * ph, u * ph * (1j * da)

    def pack(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=complex))
        u = np.atleast_1d(np.asarray(self.ray, dtype=complex))
        extra = np.array([self.angle0 + 0j, self.angle1 - self.angle0 + 0j])
        return ARC, np.concatenate([c, u, extra])


@dataclass(frozen=True)
class ConnectionTerm:
    """Linear system dY = dz (sum_j z^{powers_j} mats_j) Y along a path in C."""

    path: object
    mats: np.ndarray      # (nmat, m, m) complex
    powers: np.ndarray    # (nmat,) int

    def rhs(self, t, y):
        z, dz = self.path.at(t)
        z = complex(z) if np.ndim(z) == 0 else complex(z[0])
        dz = complex(dz) if np.ndim(dz) == 0 else complex(dz[0])
        m = np.zeros_like(self.mats[0])
        for p, mat in zip(self.powers, self.mats):
            m = m + (z ** int(p)) * mat
        return dz * (m @ y)


@dataclass(frozen=True)
class CartanLinearTerm:
    """dY = scale (sum_a (a.g')/(a.g) C_a) Y along a path in C^r."""

    path: object
    coeff_mats: np.ndarray   # (nroots, d, d)
    root_rows: np.ndarray    # (nroots, r)
    scale: complex = 1.0

    def rhs(self, t, y):
        g, dg = self.path.at(t)
        s = self.scale * (self.root_rows @ dg) / (self.root_rows @ g)
        return np.tensordot(s, self.coeff_mats, axes=1) @ y


@dataclass(frozen=True)
class IMDTerm:
    """dY = [Y, L(t, Y)], L = sum_a (a.g')/(a.g) <W_a, Y> E_a."""

    path: object
    extract: np.ndarray      # (nroots, m, m)  coefficient functionals W_a
    rootvec: np.ndarray      # (nroots, m, m)  root vectors E_a
    root_rows: np.ndarray    # (nroots, r)

    def rhs(self, t, y):
        g, dg = self.path.at(t)
        s = (self.root_rows @ dg) / (self.root_rows @ g)
        b = np.einsum("aij,ij->a", self.extract, y)
        ell = np.tensordot(s * b, self.rootvec, axes=1)
        return y @ ell - ell @ y
