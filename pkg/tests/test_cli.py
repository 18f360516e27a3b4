import json
import os

import numpy as np
import pytest

from shellkit import cli

PLATE = {"kind": "plate"}
PIETRA = {"kind": "pietraszkiewicz", "E": 1.0, "nu": 0.3, "h": 0.01}
DRILL_FREE = {"kind": "drill_free", "E": 1.0, "nu": 0.3, "h": 0.01}


def write_cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_summary(outdir):
    with open(os.path.join(outdir, "summary.json")) as fh:
        return json.load(fh)


def run_cli(verb, cfg_path, outdir, *extra):
    return cli.main([verb, "--config", cfg_path, "--out", str(outdir),
                     *extra])


def tree_bytes(outdir):
    out = {}
    for name in sorted(os.listdir(outdir)):
        with open(os.path.join(outdir, name), "rb") as fh:
            out[name] = fh.read()
    return out


def test_geometry_verb(tmp_path):
    cfg = write_cfg(tmp_path, "g.json",
                    {"chart": {"kind": "sphere", "radius": 1.2}, "seed": 3,
                     "grid": [5, 5]})
    out = tmp_path / "out"
    assert run_cli("geometry", cfg, out) == 0
    s = read_summary(out)
    assert s["schema"] == "shellkit-report/1"
    assert s["pass"] is True
    assert s["seed"] == 3
    assert (out / "geometry.csv").exists()
    header = (out / "geometry.csv").read_text().splitlines()[0]
    assert header.startswith("x1,x2,")


def test_measures_verb(tmp_path):
    state = {"displacement": {"components": [
        {"terms": [{"coef": 0.02, "powers": [1, 0]}]},
        {"terms": [{"coef": -0.01, "powers": [0, 1]}]},
        {"terms": [{"coef": 0.015, "powers": [1, 1]}]}]},
        "rotation": {"const": [0.01, -0.02, 0.03]}}
    cfg = write_cfg(tmp_path, "m.json",
                    {"chart": PLATE, "state": state, "grid": [3, 3]})
    out = tmp_path / "out"
    assert run_cli("measures", cfg, out) == 0
    assert read_summary(out)["pass"] is True


def test_check_invariance_drill_free(tmp_path):
    cfg = write_cfg(tmp_path, "i.json", {
        "chart": {"kind": "cylinder", "radius": 1.4},
        "seed": 11,
        "samples": 25,
        "models": [{"kind": "reduced", "E": 1.0, "nu": 0.3, "h": 0.01},
                   {"kind": "drill_free_full", "E": 1.0, "nu": 0.3,
                    "h": 0.01},
                   DRILL_FREE],
        "expect": "invariant"})
    out = tmp_path / "out"
    assert run_cli("check-invariance", cfg, out) == 0
    s = read_summary(out)
    assert all(c["pass"] for c in s["checks"])
    assert max(c["measured"] for c in s["checks"]) <= 1e-8


def test_check_invariance_negative_control(tmp_path):
    cfg = write_cfg(tmp_path, "n.json", {
        "chart": PLATE, "seed": 5, "samples": 40,
        "models": [PIETRA], "expect": "sensitive"})
    out = tmp_path / "out"
    assert run_cli("check-invariance", cfg, out) == 0
    s = read_summary(out)
    assert s["checks"][0]["measured"] >= 0.95


def test_check_integrals_verb(tmp_path):
    cfg = write_cfg(tmp_path, "f.json",
                    {"chart": PLATE, "seed": 9, "samples": 3, "steps": 256})
    out = tmp_path / "out"
    assert run_cli("check-integrals", cfg, out) == 0
    s = read_summary(out)
    names = {c["name"]: c for c in s["checks"]}
    assert names["max_drift"]["measured"] <= 1e-7
    assert names["min_return_ratio"]["measured"] >= 12


def test_energy_verb(tmp_path):
    cfg = write_cfg(tmp_path, "e.json", {
        "chart": PLATE, "model": PIETRA,
        "state": {"displacement": {"components": [
            {"terms": [{"coef": 0.05, "powers": [1, 0]}]},
            {"const": 0.0}, {"const": 0.0}]}},
        "grid": [5, 5]})
    out = tmp_path / "out"
    assert run_cli("energy", cfg, out) == 0
    s = read_summary(out)
    assert s["integral"] > 0


def test_linearize_verb(tmp_path):
    cfg = write_cfg(tmp_path, "l.json",
                    {"chart": PLATE, "seed": 2, "samples": 2})
    out = tmp_path / "out"
    assert run_cli("linearize", cfg, out) == 0
    s = read_summary(out)
    names = {c["name"]: c for c in s["checks"]}
    assert names["min_defect_ratio"]["measured"] > 3.5
    assert names["drill_component_residual"]["measured"] <= 1e-13


def test_minimize_verb(tmp_path):
    cfg = write_cfg(tmp_path, "z.json", {
        "chart": PLATE,
        "mesh": [5, 5],
        "model": {"kind": "pietraszkiewicz", "E": 1.0, "nu": 0.3, "h": 0.1},
        "loads": {"f": {"const": [0.0, 0.0, 2e-5]}},
        "dirichlet": ["x1min", "x1max", "x2min", "x2max"],
        "solver": {"gtol": 1e-7, "maxiter": 500}})
    out = tmp_path / "out"
    assert run_cli("minimize", cfg, out) == 0
    s = read_summary(out)
    assert s["pass"] is True
    assert s["energy"] < 0
    for artifact in ("dofs.csv", "history.csv", "residual.json"):
        assert (out / artifact).exists()


def test_spectrum_verb_zero_modes(tmp_path):
    cfg = write_cfg(tmp_path, "s.json",
                    {"chart": PLATE, "model": DRILL_FREE, "expect_zero": 4})
    out = tmp_path / "out"
    assert run_cli("spectrum", cfg, out) == 0
    s = read_summary(out)
    assert s["zero_count"] == 4


def test_spectrum_coercive(tmp_path):
    cfg = write_cfg(tmp_path, "s2.json",
                    {"chart": PLATE, "model": PIETRA, "expect_zero": 0})
    out = tmp_path / "out"
    assert run_cli("spectrum", cfg, out) == 0
    s = read_summary(out)
    assert s["min_eigenvalue"] > 0


def test_malformed_config_exits_2_without_output(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "out"
    assert run_cli("geometry", str(bad), out) == 2
    assert not out.exists()


def test_unknown_key_rejected(tmp_path):
    cfg = write_cfg(tmp_path, "u.json",
                    {"chart": PLATE, "grid": [3, 3], "bogus": 1})
    out = tmp_path / "out"
    assert run_cli("geometry", cfg, out) == 2
    assert not out.exists()


def test_unknown_nested_key_rejected(tmp_path):
    cfg = write_cfg(tmp_path, "u2.json",
                    {"chart": {"kind": "plate", "radius": 2.0}, "grid": [3, 3]})
    assert run_cli("geometry", cfg, tmp_path / "out") == 2


def test_check_failure_exit_code(tmp_path):
    # impossible tolerance: the run completes, writes artifacts, exits 1
    # (curved chart, so frame defects are small but nonzero)
    cfg = write_cfg(tmp_path, "c.json",
                    {"chart": {"kind": "sphere", "radius": 1.2},
                     "grid": [3, 3], "tolerances": {"frame": 1e-30}})
    out = tmp_path / "out"
    assert run_cli("geometry", cfg, out) == 1
    assert read_summary(out)["pass"] is False


def test_tol_scale_flag(tmp_path):
    cfg = write_cfg(tmp_path, "t.json",
                    {"chart": {"kind": "sphere", "radius": 1.2},
                     "grid": [3, 3], "tolerances": {"frame": 1e-30}})
    out = tmp_path / "out"
    assert run_cli("geometry", cfg, out, "--tol-scale", "1e20") == 0


def test_seed_override(tmp_path):
    cfg = write_cfg(tmp_path, "o.json",
                    {"chart": PLATE, "seed": 1, "samples": 2})
    out = tmp_path / "out"
    assert run_cli("check-integrals", cfg, out, "--seed", "42") == 0
    assert read_summary(out)["seed"] == 42


def test_byte_identical_reruns(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, "d.json", {
        "chart": {"kind": "sphere", "radius": 1.2}, "seed": 77,
        "samples": 10,
        "models": [DRILL_FREE], "expect": "invariant"})
    out1 = tmp_path / "out1"
    out2 = tmp_path / "out2"
    assert run_cli("check-invariance", cfg, out1) == 0
    monkeypatch.setenv("SHELLKIT_THREADS", "4")
    assert run_cli("check-invariance", cfg, out2) == 0
    assert tree_bytes(out1) == tree_bytes(out2)
