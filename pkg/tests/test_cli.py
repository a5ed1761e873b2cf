import json

import numpy as np
import pytest
from click.testing import CliRunner

from gstokes import serialize
from gstokes.cli import main
from gstokes.liealg import build_root_system

from conftest import rand_algebra, rand_gstar


@pytest.fixture
def runner():
    return CliRunner()


def test_roots(runner):
    out = runner.invoke(main, ["roots", "--family", "A", "--rank", "2"])
    assert out.exit_code == 0
    payload = json.loads(out.output)
    assert payload["defining_dim"] == 3
    assert len(payload["roots"]) == 6


def test_antistokes(runner, tmp_path):
    csv_path = tmp_path / "dirs.csv"
    out = runner.invoke(main, ["antistokes", "--family", "A", "--rank", "1",
                               "--a0", "[1.0]", "--csv", str(csv_path)])
    assert out.exit_code == 0
    payload = json.loads(out.output)
    assert payload["l"] == 1
    assert np.allclose(payload["angles"], [0.0, np.pi])
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "angle,root_indices"
    assert len(lines) == 3


def test_formalize(runner, tmp_path, rng):
    datum, basis = build_root_system("A", 1)
    coeffs = np.zeros((11, 2, 2), dtype=complex)
    coeffs[0] = np.diag([1.0, -1.0])
    coeffs[1] = rand_algebra(datum, basis, rng, 0.5)
    germ_file = tmp_path / "germ.json"
    germ_file.write_text(json.dumps(
        {"k": 2, "coeffs": [serialize.mat_to_json(c) for c in coeffs]}))
    out = runner.invoke(main, ["formalize", str(germ_file), "--family", "A",
                               "--rank", "1", "--order", "8"])
    assert out.exit_code == 0, out.output
    payload = json.loads(out.output)
    assert payload["round_trip_residual"] < 1e-12
    assert len(payload["gauge"]["coeffs"]) == 9


def test_stokes_subcommand(runner, tmp_path, rng):
    datum, basis = build_root_system("A", 1)
    b = rand_algebra(datum, basis, rng, 0.5)
    spec = {
        "family": "A", "rank": 1,
        "a0": serialize.vec_to_json([1.0]),
        "b": serialize.mat_to_json(b),
        "tolerances": {"ode": 1e-10},
    }
    in_file = tmp_path / "in.json"
    in_file.write_text(json.dumps(spec))
    trace = tmp_path / "trace.csv"
    out = runner.invoke(main, ["stokes", str(in_file), "--trace", str(trace)])
    assert out.exit_code == 0, out.output
    payload = json.loads(out.output)
    assert payload["spectral_mismatch"] < 1e-6
    sp = serialize.mat_from_json(payload["stokes"]["multipliers"][0])
    assert abs(sp[1, 0]) < 1e-8  # upper triangular
    header = trace.read_text().splitlines()[0]
    assert header.startswith("sector,t,re_z,im_z,phi_00")


def test_braid_round_trip(runner, tmp_path, rng):
    datum, basis = build_root_system("A", 2)
    p = rand_gstar(datum, basis, rng)
    pf = tmp_path / "p.json"
    pf.write_text(json.dumps(serialize.gstar_to_json(p)))
    out = runner.invoke(main, ["braid", str(pf), "--word", "1 2 -2 -1",
                               "--family", "A", "--rank", "2"])
    assert out.exit_code == 0, out.output
    q = serialize.gstar_from_json(json.loads(out.output))
    assert np.max(np.abs(q.b_plus - p.b_plus)) < 1e-11


def test_flow_word(runner, tmp_path, rng):
    datum, basis = build_root_system("A", 1)
    b0 = rand_algebra(datum, basis, rng, 0.5)
    spec = {"family": "A", "rank": 1, "b0": serialize.mat_to_json(b0),
            "a0_star": serialize.vec_to_json([1.0]), "word": "1",
            "tol_ode": 1e-10}
    in_file = tmp_path / "flow.json"
    in_file.write_text(json.dumps(spec))
    trace = tmp_path / "trace.csv"
    out = runner.invoke(main, ["flow", str(in_file), "--trace", str(trace)])
    assert out.exit_code == 0, out.output
    b1 = serialize.mat_from_json(json.loads(out.output)["b1"])
    ev0 = sorted(np.abs(np.linalg.eigvals(b0)))
    ev1 = sorted(np.abs(np.linalg.eigvals(b1)))
    assert np.allclose(ev0, ev1, atol=1e-8)
    assert trace.read_text().splitlines()[0].endswith("spectrum_drift")


def test_dmt_subcommands(runner):
    out = runner.invoke(main, ["dmt", "compare-classical", "--family", "A",
                               "--rank", "2", "--samples", "50"])
    assert out.exit_code == 0, out.output
    assert json.loads(out.output)["pass"]
    out = runner.invoke(main, ["dmt", "check-flat", "--family", "B",
                               "--rank", "2", "--samples", "20"])
    assert out.exit_code == 0, out.output
    assert json.loads(out.output)["pass"]
    out = runner.invoke(main, ["dmt", "holonomy", "--family", "A", "--rank", "2",
                               "--coupling", "0.3"])
    assert out.exit_code == 0, out.output
    y = serialize.mat_from_json(json.loads(out.output)["holonomy"])
    assert np.max(np.abs(y - np.eye(3))) < 1e-7


def test_verify_deterministic(runner, tmp_path):
    args = ["verify", "--family", "A", "--rank", "1", "--samples", "2",
            "--seed", "7"]
    out1 = runner.invoke(main, args + ["--out", str(tmp_path / "r1.json")])
    out2 = runner.invoke(main, args + ["--out", str(tmp_path / "r2.json")])
    assert out1.exit_code == 0, out1.output
    assert out2.exit_code == 0
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    report = json.loads((tmp_path / "r1.json").read_text())
    assert report["pass"]
    assert all(s["residual"] < 1e-5 for s in report["samples"])


def test_verify_exit_code_on_failure(runner):
    out = runner.invoke(main, ["verify", "--family", "A", "--rank", "1",
                               "--samples", "1", "--tol-verify", "1e-14"])
    assert out.exit_code == 1


def test_verify_csv_format(runner):
    out = runner.invoke(main, ["verify", "--family", "A", "--rank", "1",
                               "--samples", "1", "--format", "csv"])
    assert out.exit_code == 0, out.output
    assert out.output.splitlines()[0] == "sample,generator,residual,pass"
