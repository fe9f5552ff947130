"""Tests for the command-line front end: flags, exit codes, serialization."""

import json
import math

import numpy as np
import pytest

from twistorlab import __version__
from twistorlab.cli import dump_json, main

GOOD_SURFACE = """\
coords x1 x2 x3 x4
domain x1 -1 1
domain x2 -1 1
domain x3 -1 1
domain x4 -1 1
g 1 1 = 1
g 2 2 = 1
g 3 3 = 1
g 4 4 = 1
J standard
"""

BAD_SURFACE = GOOD_SURFACE.replace("g 1 1 = 1", "g 1 1 = -1")


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(argv, capsys):
    code, out, _ = run_cli(argv + ["--format", "json"], capsys)
    return code, json.loads(out)


# ======================================================================
# serialization
# ======================================================================

def test_json_floats_carry_seventeen_significant_digits():
    text = dump_json({"v": 1.0 / 3.0})
    assert '"v": 0.33333333333333331' in text
    assert json.loads(text)["v"] == 1.0 / 3.0


def test_json_handles_the_document_vocabulary():
    doc = {"a": None, "b": True, "c": [1, 2.5], "d": {"e": "s"}, "f": (),
           "g": np.float64(0.5), "h": np.int64(3)}
    parsed = json.loads(dump_json(doc))
    assert parsed == {"a": None, "b": True, "c": [1, 2.5], "d": {"e": "s"},
                      "f": [], "g": 0.5, "h": 3}


def test_json_rejects_non_finite_numbers():
    with pytest.raises(ValueError, match="non-finite"):
        dump_json({"v": float("inf")})


def test_json_rejects_unknown_types():
    with pytest.raises(TypeError):
        dump_json({"v": {1, 2}})


# ======================================================================
# appendix
# ======================================================================

def test_appendix_text_table(capsys):
    code, out, _ = run_cli(["appendix"], capsys)
    assert code == 0
    assert "structure-equation residual: 0" in out
    assert "integrable structures: 6 of 8" in out
    assert "nearly-Kahler residuals: 0 0" in out


def test_appendix_json_document(capsys):
    code, doc = run_json(["appendix"], capsys)
    assert code == 0
    assert doc["schema"] == 1
    assert doc["version"] == __version__
    assert doc["command"] == "appendix"
    assert doc["structure_equation_residual"] == 0.0
    assert doc["integrable_count"] == 6
    coeffs = {row["i"]: row["dK_coefficient"] for row in doc["rows"]}
    assert coeffs == {1: 1.0, 2: 3.0, 3: -1.0, 4: 1.0}


def test_appendix_one_parameter_coefficients(capsys):
    code, doc = run_json(["appendix", "--lambda", "0.77"], capsys)
    assert code == 0
    lam2 = 0.77 ** 2
    expected = {1: 2.0 - lam2, 2: 2.0 + lam2, 3: -lam2, 4: lam2}
    for row in doc["rows"]:
        assert abs(row["dK_coefficient"] - expected[row["i"]]) < 1e-12


def test_appendix_triple_parameters(capsys):
    code, doc = run_json(["appendix", "--lambda1", "1.3", "--lambda2", "0.7",
                          "--lambda3", "2.1"], capsys)
    assert code == 0
    assert doc["lambda"] == [1.3, 0.7, 2.1]
    for row in doc["rows"]:
        assert row["dK_residual"] == 0.0
        assert row["balanced_norm"] == 0.0


def test_appendix_rejects_mixed_parameter_styles(capsys):
    with pytest.raises(SystemExit) as err:
        main(["appendix", "--lambda", "1", "--lambda1", "1",
              "--lambda2", "1", "--lambda3", "1"])
    assert err.value.code == 2


# ======================================================================
# report
# ======================================================================

def test_report_cp2_near_the_distinguished_parameter(capsys):
    code, doc = run_json(["report", "--surface", "cp2_fs", "--params", "c=2",
                          "--connection", "lichnerowicz", "--lambda", "1.4142",
                          "--points", "5"], capsys)
    assert code == 0
    assert doc["summary"]["symplectic"] == [[1, 1.4142]]
    assert doc["summary"]["integrable"] == [1, 3, 4]
    for flags in doc["base_flags"]:
        assert flags["self_dual"]["holds"] is True
        assert flags["kahler"]["holds"] is True
        assert abs(flags["scalar_curvature"] - 12.0) < 1e-5
    for crossing, residual in doc["zero_crossings"]["1"]:
        assert abs(crossing - 2.0) < 1e-5
        assert residual < 1e-6


def test_report_flat_chern_structure_three(capsys):
    code, doc = run_json(["report", "--surface", "flat_c2", "--connection",
                          "chern", "--lambda", "1", "--points", "2"], capsys)
    assert code == 0
    held = doc["summary"]["symplectic"]
    assert [3, 1.0] in held and [4, 1.0] in held
    assert [1, 1.0] not in held


def test_report_gauduchon_is_oracle_only(capsys):
    code, doc = run_json(["report", "--surface", "hopf", "--connection",
                          "gauduchon", "--t", "0.5", "--lambda", "1",
                          "--points", "2"], capsys)
    assert code == 0
    assert all(row["formula_residual"] is None for row in doc["rows"])
    assert doc["t"] == 0.5


def test_report_triple_parameters(capsys):
    root2 = repr(math.sqrt(2.0))
    code, doc = run_json(["report", "--surface", "cp2_fs", "--params", "c=2",
                          "--lambda1", "1", "--lambda2", "1", "--lambda3", root2,
                          "--points", "2"], capsys)
    assert code == 0
    rows = {row["i"]: row for row in doc["triple_rows"]}
    assert rows[1]["symplectic"]["defect"] < 1e-6
    assert rows[2]["symplectic"]["defect"] > 1.0
    assert all(rows[i]["formula_residual"] < 1e-6 for i in (1, 2, 3, 4))
    assert "rows" not in doc


def test_report_output_is_byte_stable(capsys):
    argv = ["report", "--surface", "cp2_fs", "--params", "c=2", "--lambda",
            "1.2", "--points", "2", "--format", "json"]
    _, first, _ = run_cli(argv, capsys)
    _, second, _ = run_cli(argv, capsys)
    assert first == second


def test_report_text_mode(capsys):
    code, out, _ = run_cli(["report", "--surface", "flat_c2", "--lambda", "1",
                            "--points", "2"], capsys)
    assert code == 0
    assert "base conditions" in out
    assert "symplectic rows:" in out


def test_report_writes_atomically(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(["report", "--surface", "flat_c2", "--lambda", "1",
                            "--points", "1", "--format", "json",
                            "--out", str(target)], capsys)
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["schema"] == 1
    assert list(tmp_path.iterdir()) == [target]


# ======================================================================
# scan
# ======================================================================

def test_scan_locates_the_projective_plane_crossing(capsys):
    code, doc = run_json(["scan", "--surface", "cp2_fs", "--params", "c=2",
                          "--lambda-range", "1:2", "--grid", "5",
                          "--points", "2"], capsys)
    assert code == 0
    crossing = doc["zero_crossings"]["1"]
    assert abs(crossing["lambda"] - math.sqrt(2.0)) < 1e-6
    assert crossing["residual"] < 1e-6
    assert doc["zero_crossings"]["2"] is None
    sym = {(r["i"], r["lambda"]): r["symplectic_defect"] for r in doc["rows"]}
    assert sym[(2, 1.0)] < sym[(2, 2.0)]           # monotone growth, no zero


def test_scan_flat_third_structure_is_identically_closed(capsys):
    code, doc = run_json(["scan", "--surface", "flat_c2", "--i", "3",
                          "--lambda-range", "0.5:2", "--grid", "4",
                          "--points", "1"], capsys)
    assert code == 0
    assert all(r["symplectic_defect"] < 1e-9 for r in doc["rows"])
    assert doc["zero_crossings"]["3"] is None


def test_scan_accepts_explicit_grid_values(capsys):
    code, doc = run_json(["scan", "--surface", "flat_c2", "--i", "1",
                          "--lambda", "1", "--lambda", "2", "--points", "1"],
                         capsys)
    assert code == 0
    assert doc["grid"] == [1.0, 2.0]


def test_scan_rejects_an_empty_grid(capsys):
    with pytest.raises(SystemExit) as err:
        main(["scan", "--surface", "flat_c2"])
    assert err.value.code == 2


def test_scan_rejects_a_backward_range(capsys):
    with pytest.raises(SystemExit) as err:
        main(["scan", "--surface", "flat_c2", "--lambda-range", "2:1"])
    assert err.value.code == 2


# ======================================================================
# verify
# ======================================================================

def test_verify_appendix_suite(capsys):
    code, out, _ = run_cli(["verify", "--suite", "appendix"], capsys)
    assert code == 0
    assert "FAIL" not in out
    assert "9/9 checks passed" in out


def test_verify_algebra_suite(capsys):
    code, doc = run_json(["verify", "--suite", "algebra"], capsys)
    assert code == 0
    assert doc["passed"] is True
    names = {c["name"] for c in doc["checks"]}
    assert "algebra:wedge-laws" in names
    assert "algebra:curvature-symmetries" in names


def test_verify_oracle_suite(capsys):
    code, doc = run_json(["verify", "--suite", "oracle", "--points", "1"],
                         capsys)
    assert code == 0
    assert doc["passed"] is True
    assert len(doc["checks"]) == 8
    assert all(c["worst"] < 1e-4 for c in doc["checks"])


def test_verify_respects_thread_cap(capsys, monkeypatch):
    monkeypatch.setenv("TWISTORLAB_THREADS", "2")
    code, _, _ = run_cli(["verify", "--suite", "appendix"], capsys)
    assert code == 0


def test_malformed_thread_cap_is_rejected(capsys, monkeypatch):
    monkeypatch.setenv("TWISTORLAB_THREADS", "zero")
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "appendix"])
    assert err.value.code == 2


# ======================================================================
# surface loading and exit codes
# ======================================================================

def test_unknown_surface_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as err:
        main(["report", "--surface", "nope"])
    assert err.value.code == 2


def test_gauduchon_requires_t(capsys):
    with pytest.raises(SystemExit) as err:
        main(["report", "--surface", "hopf", "--connection", "gauduchon"])
    assert err.value.code == 2


def test_t_forbidden_outside_the_family(capsys):
    with pytest.raises(SystemExit) as err:
        main(["report", "--surface", "hopf", "--connection", "chern",
              "--t", "0.3"])
    assert err.value.code == 2


def test_surface_file_loads(tmp_path, capsys):
    path = tmp_path / "box.surf"
    path.write_text(GOOD_SURFACE)
    code, doc = run_json(["report", "--surface", str(path), "--lambda", "1",
                          "--points", "1"], capsys)
    assert code == 0
    assert doc["surface"] == "box"


def test_surface_invariant_violation_exits_three(tmp_path, capsys):
    path = tmp_path / "bad.surf"
    path.write_text(BAD_SURFACE)
    with pytest.raises(SystemExit) as err:
        main(["report", "--surface", str(path), "--points", "1"])
    assert err.value.code == 3
    assert "surface invariant violation" in capsys.readouterr().err


def test_surface_syntax_error_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "syn.surf"
    path.write_text("coords x1 x2\n")
    with pytest.raises(SystemExit) as err:
        main(["report", "--surface", str(path)])
    assert err.value.code == 2


def test_bad_params_are_usage_errors(capsys):
    for argv in (["report", "--surface", "cp2_fs", "--params", "c"],
                 ["report", "--surface", "cp2_fs", "--params", "c=two"],
                 ["report", "--surface", "cp2_fs", "--lambda", "1e-9"]):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    assert __version__ in capsys.readouterr().out
