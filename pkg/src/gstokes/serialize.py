"""JSON encoding of the library's value types.

Complex matrices are row-major nested arrays of [re, im] pairs; Cartan
elements are lists of [re, im]; root data carry family, rank and the
root coordinate list.
"""

from __future__ import annotations

import numpy as np

from .formal import ConnectionGerm, FormalType, GaugeSeries
from .gstar import GStarPoint
from .liealg import CartanElement


def cnum(z):
    z = complex(z)
    return [z.real, z.imag]


def mat_to_json(m):
    return [[cnum(z) for z in row] for row in np.asarray(m, dtype=complex)]


def mat_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def vec_to_json(v):
    return [cnum(z) for z in np.atleast_1d(np.asarray(v, dtype=complex))]


def vec_from_json(items):
    return np.array([complex(re, im) for re, im in items])


def cartan_to_json(h):
    return vec_to_json(h.coords if isinstance(h, CartanElement) else h)


def cartan_from_json(items):
    return CartanElement(vec_from_json(items))


def datum_to_json(datum):
    return {
        "family": datum.family,
        "rank": datum.rank,
        "defining_dim": datum.defining_dim,
        "roots": [list(r.coords) for r in datum.roots],
        "simple_roots": list(datum.simple_roots),
        "cartan_matrix": datum.cartan_matrix.tolist(),
        "positive_roots": list(datum.positive_root_indices()),
    }


def germ_to_json(germ):
    return {"k": germ.k, "coeffs": [mat_to_json(c) for c in germ.coeffs]}


def germ_from_json(obj):
    return ConnectionGerm(k=int(obj["k"]),
                          coeffs=np.stack([mat_from_json(c) for c in obj["coeffs"]]))


def formal_type_to_json(ftype):
    return {
        "k": ftype.k,
        "irregular": [cartan_to_json(h) for h in ftype.irregular],
        "lambda": cartan_to_json(ftype.lam),
    }


def formal_type_from_json(obj):
    return FormalType(k=int(obj["k"]),
                      irregular=tuple(cartan_from_json(h) for h in obj["irregular"]),
                      lam=cartan_from_json(obj["lambda"]))


def gauge_to_json(gauge):
    return {"coeffs": [mat_to_json(c) for c in gauge.coeffs]}


def gauge_from_json(obj):
    return GaugeSeries(coeffs=np.stack([mat_from_json(c) for c in obj["coeffs"]]))


def diagram_to_json(diagram):
    return {
        "k": diagram.k,
        "l": diagram.l,
        "angles": list(map(float, diagram.angles)),
        "supports": [sorted(s) for s in diagram.supports],
    }


def gstar_to_json(p):
    out = {
        "b_minus": mat_to_json(p.b_minus),
        "b_plus": mat_to_json(p.b_plus),
        "lambda": cartan_to_json(p.lam),
    }
    if p.positive is not None:
        out["positive"] = list(p.positive)
    return out


def gstar_from_json(obj):
    return GStarPoint(
        b_minus=mat_from_json(obj["b_minus"]),
        b_plus=mat_from_json(obj["b_plus"]),
        lam=cartan_from_json(obj["lambda"]),
        positive=tuple(obj["positive"]) if "positive" in obj else None,
    )


def stokes_to_json(sd):
    return {
        "multipliers": [mat_to_json(s) for s in sd.multipliers],
        "factors": [mat_to_json(k) for k in sd.factors],
        "lambda": cartan_to_json(sd.lam),
        "positive_roots": list(sd.positive_roots),
    }


def nu_result_to_json(res):
    diags = {}
    for key, val in res.diagnostics.items():
        if isinstance(val, dict):
            diags[key] = {k: v for k, v in val.items() if not isinstance(v, dict)}
        elif isinstance(val, (int, float, str)):
            diags[key] = val
    return {
        "stokes": stokes_to_json(res.stokes),
        "gstar": gstar_to_json(res.gstar),
        "diagnostics": diags,
    }


def path_to_json(path):
    from . import kernel
    pieces = []
    for piece in path.pieces:
        if isinstance(piece, kernel.LinePath):
            pieces.append({"kind": "line", "start": vec_to_json(piece.start),
                           "end": vec_to_json(piece.end)})
        else:
            pieces.append({"kind": "arc", "center": vec_to_json(piece.center),
                           "ray": vec_to_json(piece.ray),
                           "angle0": piece.angle0, "angle1": piece.angle1})
    return {"pieces": pieces}


def path_from_json(obj):
    from . import kernel
    from .isomonodromy import TregPath
    pieces = []
    for p in obj["pieces"]:
        if p["kind"] == "line":
            pieces.append(kernel.LinePath(vec_from_json(p["start"]),
                                          vec_from_json(p["end"])))
        elif p["kind"] == "arc":
            pieces.append(kernel.ArcPath(vec_from_json(p["center"]),
                                         vec_from_json(p["ray"]),
                                         float(p["angle0"]), float(p["angle1"])))
        else:
            raise ValueError(f"unknown path piece kind {p['kind']!r}")
    return TregPath(pieces=tuple(pieces))
