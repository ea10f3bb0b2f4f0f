import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from lightlike.cli import main

SCHEMA = json.loads(resources.files("lightlike").joinpath("schema/report-v1.json").read_text())


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "lightlike.cli", *args], capture_output=True, text=True, cwd=cwd)


def call(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def ip(x, y):
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def read_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def read_obj_vertices(path):
    return np.array([[float(x) for x in line.split()[1:]] for line in path.read_text().splitlines() if line.startswith("v ")])


# -- exit codes (subprocess) -------------------------------------------------------------
def test_exit_ok_analyze():
    r = run("analyze", "--name", "tube-circle")
    assert r.returncode == 0, r.stderr
    rep = json.loads(r.stdout)
    jsonschema.validate(rep, SCHEMA)
    assert rep["status"] == "ok"


def test_exit_analysis_error_example42():
    r = run("analyze", "--name", "example42")
    assert r.returncode == 1
    rep = json.loads(r.stdout)
    jsonschema.validate(rep, SCHEMA)
    assert rep["errors"][0]["stage"] in ("admissibility", "frame")


def test_exit_degenerate_pedal_mesh(tmp_path):
    r = run("mesh", "--name", "tube-circle", "--target", "pedal_L", "--out", str(tmp_path))
    assert r.returncode == 1
    assert "pedal collapses" in r.stderr


def test_exit_verify_fault():
    r = run("verify", "--name", "tube-circle", "--fault", "flip-N")
    assert r.returncode == 2
    rep = json.loads(r.stdout)
    jsonschema.validate(rep, SCHEMA)
    assert rep["status"] == "fail"


@pytest.mark.parametrize(
    "args",
    [
        ("analyze", "--name", "no-such-surface"),
        ("analyze", "--name", "tube-circle", "--tol", "bogus=1"),
        ("analyze", "--name", "tube-circle", "--tol", "zero=abc"),
        ("analyze",),
        ("frobnicate",),
        ("mesh", "--name", "tube-circle", "--target", "nope"),
        ("mesh", "--name", "tube-circle", "--target", "surface", "--grid", "1x4"),
    ],
)
def test_exit_usage(args):
    r = run(*args)
    assert r.returncode == 3, (r.stdout, r.stderr)
    assert r.stderr


def test_exit_usage_malformed_spec(tmp_path):
    p = tmp_path / "bad.surf"
    p.write_text("name = bad\nf0 = sin(\n")
    r = run("analyze", "--spec", str(p))
    assert r.returncode == 3
    assert ":2" in r.stderr or "line 2" in r.stderr


def test_exit_usage_missing_spec(tmp_path):
    r = run("analyze", "--spec", str(tmp_path / "missing.surf"))
    assert r.returncode == 3


# -- reports -------------------------------------------------------------------------------
@pytest.mark.parametrize("name", ["tube-gamma1", "tube-circle", "ribbon-cubic", "graph-paraboloid", "example42"])
def test_analyze_schema(capsys, name):
    code, out, _ = call(capsys, "analyze", "--name", name)
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert code == (0 if rep["status"] == "ok" else 1)


def test_verify_schema(capsys):
    code, out, _ = call(capsys, "verify", "--name", "ribbon-parabola", "--seed", "2")
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert code == 0 and rep["status"] == "ok" and rep["seed"] == 2


def test_u0_out_of_range_structured(capsys):
    code, out, _ = call(capsys, "analyze", "--name", "tube-circle", "--u0", "99")
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert code == 1
    err = rep["errors"][0]
    assert err["stage"] == "contact" and err["u0"] == 99.0 and "range" in err["message"]


def test_tol_override_recorded(capsys):
    code, out, _ = call(capsys, "analyze", "--name", "tube-circle", "--tol", "order=1e-7")
    rep = json.loads(out)
    assert code == 0 and rep["tolerances"]["order"] == 1e-7


def test_spec_file_matches_catalog(capsys, tmp_path):
    code, text, _ = call(capsys, "catalog", "--name", "ribbon-cubic")
    assert code == 0
    p = tmp_path / "r.surf"
    p.write_text(text)
    _, a, _ = call(capsys, "analyze", "--spec", str(p))
    _, b, _ = call(capsys, "analyze", "--name", "ribbon-cubic")
    ra, rb = json.loads(a), json.loads(b)
    assert ra["pedals"] == rb["pedals"] and ra["ruled"] == rb["ruled"]


def test_catalog_list(capsys):
    code, out, _ = call(capsys, "catalog")
    names = out.split()
    assert code == 0
    assert {"tube-gamma1", "tube-gamma2", "tube-circle", "tube-gamma4", "example42"} <= set(names)


# -- mesh ----------------------------------------------------------------------------------
def test_mesh_f_L_on_cone(capsys, tmp_path):
    code, out, _ = call(capsys, "mesh", "--name", "tube-circle", "--target", "f_L", "--out", str(tmp_path))
    assert code == 0
    V = read_obj_vertices(tmp_path / "tube-circle-f_L.obj")
    assert V.shape == (64 * 16, 3)
    assert np.abs(ip(V, V)).max() <= 1e-9


def test_mesh_surface_faces(capsys, tmp_path):
    code, _, _ = call(capsys, "mesh", "--name", "tube-gamma1", "--target", "surface", "--grid", "8x5", "--out", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "tube-gamma1-surface.obj").read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 40
    assert sum(l.startswith("f ") for l in lines) == 2 * 7 * 4


def test_mesh_locus_example42(capsys, tmp_path):
    code, _, _ = call(capsys, "mesh", "--name", "example42", "--target", "locus", "--out", str(tmp_path))
    assert code == 0
    d = read_csv(tmp_path / "example42-locus.csv")
    assert d.shape == (64, 4)
    g = d[:, 1:]
    assert np.abs(ip(g, g)).max() <= 1e-9


def test_mesh_pedal_rows(capsys, tmp_path):
    code, _, _ = call(capsys, "mesh", "--name", "tube-circle", "--target", "pedal_N", "--grid", "40x4", "--out", str(tmp_path))
    assert code == 0
    d = read_csv(tmp_path / "tube-circle-pedal_N.csv")
    assert d.shape == (40, 4)
    u = d[:, 0]
    np.testing.assert_allclose(d[:, 1:], np.stack([-2 + 0 * u, 2 * np.cos(u), 2 * np.sin(u)], axis=1), atol=1e-9)


def test_mesh_model_curve(capsys, tmp_path):
    code, _, _ = call(capsys, "mesh", "--name", "tube-gamma1", "--target", "model:ellipse", "--u0", "0.3", "--out", str(tmp_path))
    assert code == 0
    d = read_csv(tmp_path / "tube-gamma1-model-ellipse.csv")
    assert np.all(np.isfinite(d)) and len(d) == 64


# -- determinism ---------------------------------------------------------------------------
@pytest.mark.parametrize(
    "args",
    [
        ("analyze", "--name", "tube-gamma1", "--u0", "0.5,1.5"),
        ("verify", "--name", "ribbon-cubic", "--seed", "3"),
    ],
)
def test_reports_byte_identical(tmp_path, args):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        r = run(*args, "--out", str(p))
        assert r.returncode == 0, r.stderr
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_mesh_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        r = run("mesh", "--name", "tube-gamma4", "--target", "f_N", "--out", str(d))
        assert r.returncode == 0, r.stderr
        outs.append((d / "tube-gamma4-f_N.obj").read_bytes())
    assert outs[0] == outs[1]
