# tests/test_state.py
import json

import numpy as np
import pytest

from qgeokit.config import make_config
from qgeokit.errors import ConfigError
from qgeokit.schemas import REPORT_SCHEMA, ensure_valid
from qgeokit.state import (TOLERANCE_DEFAULTS, build_run_config, load_run_config, parse_matrix, parse_vector,
                           progress_enabled)
from qgeokit.summarizer import build_report, summarize_records
from qgeokit.validator import crash_record, make_record, validate_record


# -------------------
# Geometry config
# -------------------
def test_geometry_defaults():
    cfg = make_config()
    assert cfg.alpha == 0.5
    assert cfg.boundary_floor == 1e-9
    assert cfg.curvature_order == 4


@pytest.mark.parametrize("kwargs", [
    {"alpha": 0.0},
    {"n": 1},
    {"n": 4, "boundary_floor": 0.3},
    {"curvature_order": 3},
    {"colour": "blue"},
])
def test_geometry_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        make_config(**kwargs)


def test_geometry_config_is_frozen():
    cfg = make_config()
    with pytest.raises(Exception):
        cfg.alpha = 1.0


# -------------------
# Run documents
# -------------------
def test_defaults_are_injected():
    cfg = build_run_config({"command": "evolve"})
    assert cfg.n == 3
    assert cfg.seed == 0
    assert cfg.tolerances == TOLERANCE_DEFAULTS
    assert cfg.evolve["M"] == [[0.0, 1.0], [1.0, 0.0]]
    assert cfg.kahler["sizes"] == [2, 4, 8, 16]
    assert cfg.oracle["segments"] == 64


def test_user_tolerances_are_kept():
    cfg = build_run_config({"command": "distance", "tolerances": {"distance": 1e-9}})
    assert cfg.tol("distance") == 1e-9
    assert cfg.tol("kahler") == TOLERANCE_DEFAULTS["kahler"]


def test_override_precedence(monkeypatch):
    doc = {"command": "distance", "seed": 1, "out_dir": "from_file"}
    monkeypatch.setenv("QGEOKIT_SEED", "2")
    monkeypatch.setenv("QGEOKIT_OUT_DIR", "from_env")
    cfg = build_run_config(doc, "distance")
    assert (cfg.seed, cfg.out_dir) == (2, "from_env")
    cfg = build_run_config(doc, "distance", {"seed": 3, "out_dir": None})
    assert (cfg.seed, cfg.out_dir) == (3, "from_env")
    assert doc["seed"] == 1


def test_bad_env_seed(monkeypatch):
    monkeypatch.setenv("QGEOKIT_SEED", "seven")
    with pytest.raises(ConfigError):
        build_run_config({"command": "distance"})


def test_command_mismatch():
    with pytest.raises(ConfigError):
        build_run_config({"command": "evolve"}, "oracle")


@pytest.mark.parametrize("doc", [
    {"command": "teleport"},
    {"command": "distance", "n": 1},
    {"command": "distance", "alpha": -1.0},
    {"command": "distance", "tolerances": {"distance": 0.0}},
    {"command": "oracle", "oracle": {"segments": 2}},
    {"command": "kahler-check", "kahler": {"inject_fault": "sign"}},
    {"command": "evolve", "evolve": {"M": [[1.0, [0.0, 1.0, 2.0]]]}},
    {"command": "distance", "unknown_key": 1},
])
def test_invalid_documents(doc):
    with pytest.raises(ConfigError):
        build_run_config(doc)


def test_load_run_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "kahler-check", "n": 4}), encoding="utf-8")
    cfg = load_run_config(path, "kahler-check")
    assert cfg.n == 4
    assert cfg.geometry().n == 4
    assert cfg.geometry(2).n == 2


def test_load_run_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(broken)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(listed)


def test_progress_flag(monkeypatch):
    assert not progress_enabled()
    monkeypatch.setenv("QGEOKIT_PROGRESS", "1")
    assert progress_enabled()


def test_parse_vector_and_matrix():
    np.testing.assert_array_equal(parse_vector([1.0, [0.0, 2.0]]), [1.0, 2j])
    np.testing.assert_array_equal(parse_matrix([[0, [0, -1]], [[0, 1], 0]]), [[0, -1j], [1j, 0]])
    with pytest.raises(ConfigError):
        parse_matrix([[1.0, 2.0]])
    with pytest.raises(ConfigError):
        parse_vector(["x"])


# -------------------
# Records and reports
# -------------------
@pytest.mark.parametrize("rec, ok, prefix", [
    ({"residual": 1e-12, "tolerance": 1e-10}, True, "OK"),
    ({"residual": 1e-8, "tolerance": 1e-10}, False, "ABOVE_TOLERANCE"),
    ({"residual": None, "tolerance": 1e-10}, False, "RESIDUAL"),
    ({"residual": float("nan"), "tolerance": 1e-10}, False, "RESIDUAL"),
    ({"residual": 0.5, "tolerance": 1e-3, "bound": "lower"}, True, "OK"),
    ({"residual": 1e-4, "tolerance": 1e-3, "bound": "lower"}, False, "BELOW_BOUND"),
    ({"residual": -0.01, "tolerance": 0.05, "low": -1e-3}, False, "BELOW_INTERVAL"),
    ({"residual": -1e-4, "tolerance": 0.05, "low": -1e-3}, True, "OK"),
])
def test_validate_record(rec, ok, prefix):
    passed, msg = validate_record(rec)
    assert passed is ok
    assert msg.startswith(prefix)


def test_make_record_detail():
    good = make_record("a", "Omega = g J", 1e-14, 1e-10, detail="n=2")
    assert good["passed"] and good["detail"] == "n=2"
    bad = make_record("b", "J^2 = -1", 1.0, 1e-10, detail="n=2")
    assert not bad["passed"]
    assert bad["detail"].startswith("ABOVE_TOLERANCE") and bad["detail"].endswith("n=2")


def test_crash_record():
    rec = crash_record("evolve", RuntimeError("boom"))
    assert rec["passed"] is False
    assert rec["detail"] == "RuntimeError: boom"


def test_summary_and_report():
    records = [make_record("z", "t", 0.0, 1.0), make_record("a", "t", 2.0, 1.0)]
    report = build_report("distance", 0, 0.5, records)
    assert [r["name"] for r in report["records"]] == ["a", "z"]
    assert report["summary"] == {"total": 2, "passed": 1, "failed": 1, "ok": False, "failed_names": ["a"]}
    ensure_valid(REPORT_SCHEMA, report, "report")


def test_empty_suite_is_not_ok():
    assert summarize_records([])["ok"] is False


def test_report_schema_rejects_bad_record():
    report = build_report("distance", 0, 0.5, [make_record("a", "t", 0.0, 1.0)])
    report["records"][0]["passed"] = "yes"
    with pytest.raises(ConfigError):
        ensure_valid(REPORT_SCHEMA, report, "report")
