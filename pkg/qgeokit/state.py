# qgeokit/state.py
# Run document loading: JSON in, defaults injected, env and CLI overrides, RunConfig out.
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from pydantic import ValidationError

from qgeokit.config import RunConfig
from qgeokit.errors import ConfigError
from qgeokit.schemas import RUN_CONFIG_SCHEMA, ensure_valid

TOLERANCE_DEFAULTS = {
    "distance": 1e-12,
    "kahler": 1e-10,
    "admissibility": 1e-12,
    "curvature": 1e-5,
    "sphere": 1e-4,
    "pullback": 1e-10,
    "canonical_fd": 1e-6,
    "canonical_analytic": 1e-12,
    "mixed_block": 1e-3,
    "norm": 1e-10,
    "energy": 1e-9,
    "dirac": 1e-9,
    "exact": 1e-5,
    "unitarity": 1e-12,
    "gap_low": 1e-3,
    "gap_high": 5e-2,
}


def _ensure_run_defaults(doc: dict) -> dict:
    doc.setdefault("tolerances", {})
    for key, value in TOLERANCE_DEFAULTS.items():
        doc["tolerances"].setdefault(key, value)
    doc.setdefault("distance", {})
    doc["distance"].setdefault("pairs", [])
    doc.setdefault("kahler", {})
    doc["kahler"].setdefault("sizes", [2, 4, 8, 16])
    doc["kahler"].setdefault("scale", 0.5)
    doc["kahler"].setdefault("curvature_points", 20)
    doc["kahler"].setdefault("inject_fault", None)
    doc.setdefault("evolve", {})
    # two-level exchange by default, run to t = pi alpha / 2
    doc["evolve"].setdefault("M", [[0.0, 1.0], [1.0, 0.0]])
    doc["evolve"].setdefault("E", 0.0)
    doc["evolve"].setdefault("steps", 1000)
    doc.setdefault("oracle", {})
    doc["oracle"].setdefault("pairs", 10)
    doc["oracle"].setdefault("segments", 64)
    doc["oracle"].setdefault("iterations", 5000)
    doc["oracle"].setdefault("fixed", [])
    return doc


def _env_overrides() -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    seed = os.getenv("QGEOKIT_SEED")
    if seed:
        try:
            out["seed"] = int(seed)
        except ValueError as e:
            raise ConfigError(f"QGEOKIT_SEED must be an integer, got {seed!r}") from e
    out_dir = os.getenv("QGEOKIT_OUT_DIR")
    if out_dir:
        out["out_dir"] = out_dir
    return out


def progress_enabled() -> bool:
    return os.getenv("QGEOKIT_PROGRESS", "1") != "0"


def load_document(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return doc


def build_run_config(doc: dict, command: Optional[str] = None,
                     overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Precedence: explicit overrides (CLI flags) > environment > document."""
    doc = json.loads(json.dumps(doc))
    if command is not None:
        doc.setdefault("command", command)
        if doc["command"] != command:
            raise ConfigError(f"config is for {doc['command']!r}, not {command!r}")
    doc.update(_env_overrides())
    doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
    doc = _ensure_run_defaults(doc)
    ensure_valid(RUN_CONFIG_SCHEMA, doc, "run config")
    try:
        return RunConfig(**doc)
    except ValidationError as e:
        raise ConfigError(f"invalid run config: {e}") from e


def load_run_config(path: Path, command: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    return build_run_config(load_document(path), command, overrides)


# -------------------
# Value parsing
# -------------------
def _entry(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def parse_vector(values, name: str = "vector") -> np.ndarray:
    """Reals or [re, im] pairs to a complex array."""
    try:
        return np.array([_entry(v) for v in values], dtype=complex)
    except (TypeError, ValueError, IndexError) as e:
        raise ConfigError(f"{name} has a malformed entry: {e}") from e


def parse_matrix(rows, name: str = "matrix") -> np.ndarray:
    mat = [parse_vector(r, name) for r in rows]
    if len({r.size for r in mat}) != 1 or mat[0].size != len(mat):
        raise ConfigError(f"{name} must be square, got {len(mat)} rows of sizes {[r.size for r in mat]}")
    return np.stack(mat)
