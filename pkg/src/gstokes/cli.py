"""Command-line front end.

One binary, subcommand dispatch; inputs and outputs are JSON (matrices
as nested [re, im] pairs), traces are CSV with a fixed header.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click
import numpy as np

from . import kernel, serialize
from .dmt import build_dmt_form, classical_quantum_compare, dmt_flatness_check, dmt_holonomy
from .errors import GStokesError
from .formal import apply_gauge_series, formal_normalize
from .gstar import braid_word_apply
from .isomonodromy import brieskorn_path, integrate_flow
from .liealg import CartanElement, build_root_system
from .stokes_geometry import SectorChoice, anti_stokes, half_periods
from .stokes_numeric import MatchingPlan, direct_monodromy, monodromy_map_nu
from .verify import RunConfig, verify_theorem_holonomy

_FAMILY = click.Choice(["A", "B", "C", "D"])


def _emit(obj, out, fmt="json"):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _read_json(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


@click.group()
def main():
    """Stokes data, isomonodromy flows and braid actions for classical groups."""


@main.command()
@click.option("--family", type=_FAMILY, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--out", type=click.Path(), default=None)
def roots(family, rank, out):
    """Emit the root datum (roots, simple roots, Cartan matrix)."""
    datum, _ = build_root_system(family, rank)
    _emit(serialize.datum_to_json(datum), out)


@main.command()
@click.option("--family", type=_FAMILY, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--k", "pole_order", type=int, default=2, show_default=True)
@click.option("--a0", "a0_json", required=True,
              help="Cartan coordinates as JSON: [re, im] pairs or plain reals")
@click.option("--out", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="also write (angle, root indices) rows")
def antistokes(family, rank, pole_order, a0_json, out, csv_path):
    """Anti-Stokes diagram of a regular leading coefficient."""
    datum, _ = build_root_system(family, rank)
    raw = json.loads(a0_json)
    coords = serialize.vec_from_json(raw) if raw and isinstance(raw[0], list) \
        else np.array(raw, dtype=complex)
    diagram = anti_stokes(datum, CartanElement(coords), pole_order)
    payload = serialize.diagram_to_json(diagram)
    payload["half_periods"] = [
        {"directions": list(idxs), "positive_roots": list(union)}
        for idxs, union in half_periods(diagram)]
    _emit(payload, out)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["angle", "root_indices"])
            for ang, sup in zip(diagram.angles, diagram.supports):
                writer.writerow([f"{ang:.15g}", " ".join(map(str, sorted(sup)))])


@main.command()
@click.argument("germ_file", type=click.Path(exists=True, allow_dash=True))
@click.option("--family", type=_FAMILY, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--order", "n_order", type=int, default=12, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def formalize(germ_file, family, rank, n_order, out):
    """Diagonalize a connection germ: formal type plus gauge series."""
    datum, _ = build_root_system(family, rank)
    germ = serialize.germ_from_json(_read_json(germ_file))
    ftype, gauge = formal_normalize(datum, germ, n_order)
    back = apply_gauge_series(datum, gauge, ftype, n_order)
    resid = float(np.max(np.abs(back.coeffs - germ.coeffs[: n_order + 1])))
    _emit({"formal_type": serialize.formal_type_to_json(ftype),
           "gauge": serialize.gauge_to_json(gauge),
           "round_trip_residual": resid}, out)


@main.command()
@click.argument("input_file", type=click.Path(exists=True, allow_dash=True))
@click.option("--out", type=click.Path(), default=None)
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="per-step CSV (t, z, solution entries) of the ray integrations")
def stokes(input_file, out, trace_path):
    """Stokes multipliers of (A0/z^2 + B/z) dz.

    Input JSON: {family, rank, a0, b, ptilde_angle?, log_branch?,
    tolerances?{ode, match, memb}, n_trunc?, r_match?}.
    """
    obj = _read_json(input_file)
    datum, _ = build_root_system(obj["family"], int(obj["rank"]))
    a0 = serialize.cartan_from_json(obj["a0"])
    b = serialize.mat_from_json(obj["b"])
    tols = obj.get("tolerances", {})
    plan = MatchingPlan(
        tol_ode=float(tols.get("ode", 1e-9)),
        tol_match=float(tols.get("match", 1e-6)),
        tol_memb=float(tols.get("memb", 1e-6)),
        n_trunc=int(obj.get("n_trunc", 12)),
        r_match=obj.get("r_match"),
    )
    choice = SectorChoice(base_angle=float(obj.get("ptilde_angle", 1.5 * np.pi)),
                          log_branch=obj.get("log_branch"))
    res = monodromy_map_nu(datum, a0, b, choice=choice, plan=plan)
    payload = serialize.nu_result_to_json(res)
    if obj.get("spectral_check", True):
        mono, _ = direct_monodromy(datum, a0, b, tol_ode=plan.tol_ode)
        from .stokes_numeric import spectral_mismatch
        sp, sm = res.stokes.multipliers
        m0 = res.stokes.formal_monodromy(datum)
        payload["spectral_mismatch"] = spectral_mismatch(sm @ sp @ m0, mono)
    _emit(payload, out)
    if trace_path:
        _write_ray_trace(datum, a0, b, res, plan, trace_path)


def _write_ray_trace(datum, a0, b, res, plan, trace_path):
    from .stokes_numeric import _ray_term, _seed_value, prepare_nu
    prep = prepare_nu(datum, a0, b, res.frame.choice, plan)
    frame = prep["frame"]
    rows = []
    for i in (frame.diagram.l, frame.n):
        psi = frame.sector_arg(i)
        seed = _seed_value(datum, prep["ftype"], prep["gauge"], prep["r_match"], psi)
        trace = []
        kernel.propagate(_ray_term(prep["a0_mat"], prep["b_mat"],
                                   prep["r_match"], plan.r_eval, psi), seed,
                         rtol=plan.tol_ode, atol=plan.tol_ode * 1e-3, trace=trace)
        for t, y in trace:
            r = prep["r_match"] + (plan.r_eval - prep["r_match"]) * t
            z = r * np.exp(1j * psi)
            rows.append([i, t, z.real, z.imag] + [f"{v.real:.12g}{v.imag:+.12g}j"
                                                  for v in y.ravel()])
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        dim = datum.defining_dim
        writer.writerow(["sector", "t", "re_z", "im_z"] +
                        [f"phi_{r}{c}" for r in range(dim) for c in range(dim)])
        writer.writerows(rows)


@main.command()
@click.argument("point_file", type=click.Path(exists=True, allow_dash=True))
@click.option("--word", required=True, help="signed generator indices, e.g. '1 2 -1'")
@click.option("--family", type=_FAMILY, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--action", type=click.Choice(["dkp", "holonomy"]), default="dkp",
              show_default=True)
@click.option("--convention", type=click.Choice(["standard", "inverted"]),
              default="standard", show_default=True)
@click.option("--out", type=click.Path(), default=None)
def braid(point_file, word, family, rank, action, convention, out):
    """Apply a braid word to a G* point."""
    datum, _ = build_root_system(family, rank)
    p = serialize.gstar_from_json(_read_json(point_file))
    indices = [int(w) for w in word.split()]
    q = braid_word_apply(datum, indices, p, action=action,
                         sign_convention=convention)
    _emit(serialize.gstar_to_json(q), out)


@main.command()
@click.argument("input_file", type=click.Path(exists=True, allow_dash=True))
@click.option("--out", type=click.Path(), default=None)
@click.option("--trace", "trace_path", type=click.Path(), default=None)
def flow(input_file, out, trace_path):
    """Integrate the deformation equation along a path or generator word.

    Input JSON: {family, rank, b0, a0_star+word | path, tol_ode?}.
    """
    obj = _read_json(input_file)
    datum, _ = build_root_system(obj["family"], int(obj["rank"]))
    b0 = serialize.mat_from_json(obj["b0"])
    tol = float(obj.get("tol_ode", 1e-9))
    if "path" in obj:
        paths = [serialize.path_from_json(obj["path"])]
    else:
        a0 = serialize.cartan_from_json(obj["a0_star"])
        word = [int(w) for w in str(obj["word"]).split()]
        paths = []
        cur = a0
        from .liealg import weyl_reflection
        for i in word:
            paths.append(brieskorn_path(datum, abs(i), cur))
            cur = weyl_reflection(datum, abs(i), cur)
    b = b0
    rows = []
    ev0 = np.sort(np.abs(np.linalg.eigvals(b0)))
    for path in paths:
        trace = [] if trace_path else None
        for piece in path.pieces:
            from .isomonodromy import TregPath
            sub = TregPath(pieces=(piece,))
            b, _ = integrate_flow(datum, b, sub, tol_ode=tol, trace=trace)
        if trace_path:
            for t, y in trace:
                ev = np.sort(np.abs(np.linalg.eigvals(y)))
                rows.append([t] + [f"{v.real:.12g}{v.imag:+.12g}j" for v in y.ravel()]
                            + [float(np.max(np.abs(ev - ev0)))])
    payload = {"b1": serialize.mat_to_json(b)}
    _emit(payload, out)
    if trace_path:
        dim = datum.defining_dim
        with open(trace_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"b_{r}{c}" for r in range(dim) for c in range(dim)]
                            + ["spectrum_drift"])
            writer.writerows(rows)


@main.group()
def dmt():
    """Flat-connection checks for the symmetrized Hamiltonians."""


@dmt.command("check-flat")
@click.option("--family", type=_FAMILY, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--rep", type=click.Choice(["defining", "adjoint"]), default="defining",
              show_default=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def dmt_check_flat(family, rank, rep, samples, seed, out):
    datum, _ = build_root_system(family, rank)
    form = build_dmt_form(datum, rep)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        a0 = _random_regular(datum, rng)
        u = CartanElement(rng.normal(size=rank) + 1j * rng.normal(size=rank))
        v = CartanElement(rng.normal(size=rank) + 1j * rng.normal(size=rank))
        worst = max(worst, dmt_flatness_check(form, datum, a0, u, v))
    _emit({"check": "dmt_flatness", "family": family, "rank": rank,
           "rep": rep, "samples": samples, "worst_residual": worst,
           "pass": bool(worst < 1e-10)}, out)


@dmt.command("compare-classical")
@click.option("--family", type=_FAMILY, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def dmt_compare_classical(family, rank, samples, seed, out):
    datum, basis = build_root_system(family, rank)
    rng = np.random.default_rng(seed)
    from .verify import random_algebra_element
    worst = 0.0
    for _ in range(samples):
        a0 = _random_regular(datum, rng)
        v = CartanElement(rng.normal(size=rank) + 1j * rng.normal(size=rank))
        b = random_algebra_element(datum, basis, rng)
        worst = max(worst, classical_quantum_compare(datum, a0, v, b))
    _emit({"check": "classical_quantum", "family": family, "rank": rank,
           "samples": samples, "worst_residual": worst,
           "pass": bool(worst < 1e-11)}, out)


@dmt.command("holonomy")
@click.option("--family", type=_FAMILY, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--rep", type=click.Choice(["defining", "adjoint"]), default="defining",
              show_default=True)
@click.option("--coupling", type=float, default=0.3, show_default=True)
@click.option("--loop-file", type=click.Path(exists=True), default=None,
              help="JSON path object; default is a small rectangle")
@click.option("--tol-ode", type=float, default=1e-10, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def dmt_holonomy_cmd(family, rank, rep, coupling, loop_file, tol_ode, out):
    datum, _ = build_root_system(family, rank)
    form = build_dmt_form(datum, rep, coupling=coupling)
    if loop_file:
        loop = serialize.path_from_json(_read_json(loop_file))
    else:
        from .isomonodromy import closed_rectangle
        from .verify import default_dominant
        corner = np.real(default_dominant(datum).coords)
        loop = closed_rectangle(corner, 0.2 * np.ones(rank), 0.1j * np.ones(rank))
    y, stats = dmt_holonomy(form, datum, loop, tol_ode=tol_ode)
    _emit({"holonomy": serialize.mat_to_json(y), "steps": stats["n_accept"]}, out)


def _random_regular(datum, rng, margin=0.2):
    while True:
        h = CartanElement(rng.normal(size=datum.rank) + 1j * rng.normal(size=datum.rank))
        vals = [abs(datum.root_value(i, h)) for i in range(datum.n_roots)]
        if min(vals) > margin:
            return h


@main.command()
@click.option("--family", type=_FAMILY, default="A", show_default=True)
@click.option("--rank", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=10, show_default=True)
@click.option("--tol-ode", type=float, default=1e-9, show_default=True)
@click.option("--tol-verify", type=float, default=1e-5, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def verify(family, rank, seed, samples, tol_ode, tol_verify, out, fmt):
    """Holonomy-vs-braid-action comparison over seeded samples."""
    config = RunConfig(family=family, rank=rank, seed=seed, tol_ode=tol_ode,
                       tol_verify=tol_verify, n_samples=samples)
    try:
        report = verify_theorem_holonomy(config)
    except GStokesError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["sample", "generator", "residual", "pass"])
        for s in report["samples"]:
            writer.writerow([s["sample"], s["generator"],
                             s.get("residual", ""), s["pass"]])
        text = buf.getvalue()
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    else:
        _emit(report, out)
    for s in report["samples"]:
        status = "pass" if s["pass"] else "FAIL"
        detail = s.get("error") or f"residual {s.get('residual'):.3e}"
        click.echo(f"[{status}] sample {s['sample']} generator {s['generator']}: {detail}",
                   err=True)
    sys.exit(0 if report["pass"] else 1)


if __name__ == "__main__":
    main()
