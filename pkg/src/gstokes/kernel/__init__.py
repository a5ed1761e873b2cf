"""Adaptive integration kernel with a compiled core and a numpy fallback.

The Cython extension ``_native`` is preferred when importable; setting
``GSTOKES_PURE_PYTHON=1`` in the environment forces the fallback.  Both
lanes implement the same Dormand-Prince 5(4) stepper over the term
descriptions in :mod:`gstokes.kernel.terms`.
"""

from __future__ import annotations

import os

import numpy as np

from . import _fallback
from .terms import (
    ARC,
    CARTAN_LINEAR,
    CONNECTION,
    IMD,
    LINE,
    ArcPath,
    CartanLinearTerm,
    ConnectionTerm,
    IMDTerm,
    LinePath,
)

if os.environ.get("GSTOKES_PURE_PYTHON"):
    _native = None
else:
    try:
        from . import _native
    except ImportError:
        _native = None

HAVE_NATIVE = _native is not None

_EMPTY3 = np.zeros((0, 1, 1), dtype=complex)
_EMPTY_POW = np.zeros(0, dtype=np.int64)
_EMPTY_ROWS = np.zeros((0, 1), dtype=complex)


def _lower(term):
    """Flatten a term into the (kind, arrays...) native call signature."""
    path_kind, path_data = term.path.pack()
    if isinstance(term, ConnectionTerm):
        return (CONNECTION, path_kind, path_data,
                np.ascontiguousarray(term.mats, dtype=complex),
                np.ascontiguousarray(term.powers, dtype=np.int64),
                _EMPTY3, _EMPTY_ROWS, 1.0 + 0j)
    if isinstance(term, CartanLinearTerm):
        return (CARTAN_LINEAR, path_kind, path_data,
                np.ascontiguousarray(term.coeff_mats, dtype=complex),
                _EMPTY_POW, _EMPTY3,
                np.ascontiguousarray(term.root_rows, dtype=complex),
                complex(term.scale))
    if isinstance(term, IMDTerm):
        return (IMD, path_kind, path_data,
                np.ascontiguousarray(term.extract, dtype=complex),
                _EMPTY_POW,
                np.ascontiguousarray(term.rootvec, dtype=complex),
                np.ascontiguousarray(term.root_rows, dtype=complex),
                1.0 + 0j)
    raise TypeError(f"unknown term type {type(term)!r}")


def propagate(term, y0, rtol=1e-9, atol=1e-12, max_steps=1_000_000,
              trace=None, force_fallback=False):
    """Integrate the term's ODE over t in [0, 1] starting from ``y0``."""
    if HAVE_NATIVE and not force_fallback:
        args = _lower(term)
        return _native.propagate(*args, y0, rtol, atol, max_steps, trace)
    return _fallback.propagate(term, y0, rtol=rtol, atol=atol,
                               max_steps=max_steps, trace=trace)


def propagate_pieces(make_term, pieces, y0, rtol=1e-9, atol=1e-12, **kw):
    """Chain ``propagate`` over path pieces; ``make_term(piece) -> term``."""
    y = np.array(y0, dtype=complex)
    total = {"n_accept": 0, "n_reject": 0}
    for piece in pieces:
        y, stats = propagate(make_term(piece), y, rtol=rtol, atol=atol, **kw)
        total["n_accept"] += stats["n_accept"]
        total["n_reject"] += stats["n_reject"]
    return y, total


__all__ = [
    "ArcPath", "LinePath",
    "ConnectionTerm", "CartanLinearTerm", "IMDTerm",
    "propagate", "propagate_pieces", "HAVE_NATIVE",
]
