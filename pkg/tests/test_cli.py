import json

import numpy as np

from trefftzwave.cli import main


def run(args):
    return main([str(a) for a in args])


def test_mesh_subcommand_writes_file(tmp_path, capsys):
    out = tmp_path / "m"
    assert run(["--out", out, "mesh"]) == 0
    payload = json.loads((out / "mesh.json").read_text())
    assert payload["format"] == "spacetime-mesh"
    assert len(payload["elements"]) == 16
    assert "wrote" in capsys.readouterr().out


def test_solve_writes_artifacts_and_report(tmp_path):
    out = tmp_path / "s"
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "mesh": {"kind": "tent", "nx": 4, "zeta": 0.5},
        "p": 1,
        "problem": {"name": "traveling_sine", "k": 2.0},
    }))
    assert run(["--config", cfgfile, "--out", out, "solve"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["route"] == "causal"
    assert report["norms"]["dg"] > 0
    # boundary data pumps energy in, so the homogeneous-data dissipation
    # flag is merely reported here, not asserted
    assert isinstance(report["energy"]["dissipative"], bool)
    assert "N" in report["constants"] and "C_stab" in report["constants"]
    # Robin-only boundary: the Theorem a priori bound is checked per run
    assert report["stability_bound"]["holds"] is True
    assert (out / "solution.csv").exists()
    assert (out / "coefficients.txt").exists()


def test_solve_artifacts_are_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert run(["--out", out, "--p", 1, "--seed", 3, "solve"]) == 0
    for name in ("solution.csv", "coefficients.txt", "report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_verify_passes_on_defaults(tmp_path, capsys):
    assert run(["--seed", 0, "verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    for name in ("coercivity", "continuity", "consistency", "flux_decomposition",
                 "solver_equivalence", "jump_identities", "dissipativity"):
        assert f"PASS {name}" in out


def test_converge_writes_table(tmp_path, capsys):
    out = tmp_path / "c"
    assert run(["--out", out, "--p", 1, "--levels", 2, "converge"]) == 0
    rows = (out / "convergence.csv").read_text().strip().splitlines()
    assert rows[0] == "h,dofs,l2q_error,dg_error,order_l2,order_dg"
    assert len(rows) == 3


def test_constants_on_causal_slab(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "mesh": {"kind": "slab", "nx": 1, "nt": 4},
        "bc": ["R", "R"],
    }))
    assert run(["--config", cfgfile, "constants"]) == 0
    out = capsys.readouterr().out
    assert "C_c = 2.0" in out
    assert "N = 4" in out
    assert f"C_stab = {float(np.sqrt(40.0))!r}" in out


def test_constants_reports_unavailable_stability(capsys):
    assert run(["constants"]) == 0  # default 4x4 slab has time-like faces
    out = capsys.readouterr().out
    assert "C_stab unavailable" in out


def test_bad_config_json_gives_diagnostics(tmp_path, capsys):
    cfgfile = tmp_path / "broken.json"
    cfgfile.write_text('{"p": 2,,}')
    assert run(["--config", cfgfile, "mesh"]) == 2
    err = capsys.readouterr().err
    assert "line" in err and "column" in err


def test_bad_field_rejected(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"p": 42}))
    assert run(["--config", cfgfile, "mesh"]) == 2
    assert "'p'" in capsys.readouterr().err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"degree": 2}))
    assert run(["--config", cfgfile, "mesh"]) == 2
    assert "unknown config fields" in capsys.readouterr().err


def test_raw_problem_data(tmp_path):
    out = tmp_path / "raw"
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "mesh": {"kind": "slab", "nx": 2, "nt": 2},
        "p": 1,
        "problem": {"name": "raw", "v0": "np.exp(-30*(x-0.5)**2)"},
        "bc": ["R", "R"],
    }))
    assert run(["--config", cfgfile, "--out", out, "solve"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["energy"]["e_initial"] > 0
    assert "l2q_error" not in report
