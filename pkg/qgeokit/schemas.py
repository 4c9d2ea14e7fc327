# qgeokit/schemas.py
# JSON Schemas for the run document and the emitted report.
# The runner checks every document it reads and every report it writes.
from jsonschema import Draft202012Validator
from jsonschema.exceptions import ValidationError

from qgeokit.errors import ConfigError

COMMANDS = ["distance", "kahler-check", "evolve", "oracle"]

_NUMBER_OR_PAIR = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

MATRIX_SCHEMA = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": _NUMBER_OR_PAIR},
}

_PAIR_LIST = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["a", "b"],
        "properties": {
            "a": {"type": "array", "items": _NUMBER_OR_PAIR},
            "b": {"type": "array", "items": _NUMBER_OR_PAIR},
            "id": {"type": "string"},
        },
    },
}

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "required": ["command"],
    "properties": {
        "command": {"type": "string", "enum": COMMANDS},
        "n": {"type": "integer", "minimum": 2, "maximum": 64},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "out_dir": {"type": "string"},
        "boundary_floor": {"type": "number", "exclusiveMinimum": 0},
        "fd_step": {"type": "number", "exclusiveMinimum": 0},
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
        },
        "distance": {
            "type": "object",
            "properties": {
                "pairs": _PAIR_LIST,
            },
        },
        "kahler": {
            "type": "object",
            "properties": {
                "sizes": {"type": "array", "items": {"type": "integer", "minimum": 2, "maximum": 64}},
                "scale": {"type": "number", "minimum": 0},
                "curvature_points": {"type": "integer", "minimum": 0},
                "inject_fault": {"type": ["string", "null"], "enum": ["j_sign", None]},
            },
        },
        "evolve": {
            "type": "object",
            "properties": {
                "M": MATRIX_SCHEMA,
                "N": MATRIX_SCHEMA,
                "E": {"type": "number"},
                "psi0": {"type": "array", "items": _NUMBER_OR_PAIR},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "steps": {"type": "integer", "minimum": 1},
            },
        },
        "oracle": {
            "type": "object",
            "properties": {
                "pairs": {"type": "integer", "minimum": 0},
                "segments": {"type": "integer", "minimum": 4},
                "iterations": {"type": "integer", "minimum": 1},
                "fixed": _PAIR_LIST,
            },
        },
    },
}

RECORD_SCHEMA = {
    "type": "object",
    "required": ["name", "tag", "residual", "tolerance", "passed"],
    "properties": {
        "name": {"type": "string"},
        "tag": {"type": "string"},
        "residual": {"type": ["number", "null"]},
        "tolerance": {"type": "number"},
        "passed": {"type": "boolean"},
        "bound": {"type": "string", "enum": ["upper", "lower"]},
        "low": {"type": ["number", "null"]},
        "detail": {"type": ["string", "null"]},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "seed", "alpha", "records", "summary"],
    "properties": {
        "command": {"type": "string", "enum": COMMANDS},
        "seed": {"type": "integer"},
        "alpha": {"type": "number"},
        "records": {"type": "array", "items": RECORD_SCHEMA},
        "summary": {
            "type": "object",
            "required": ["total", "passed", "failed", "ok"],
            "properties": {
                "total": {"type": "integer"},
                "passed": {"type": "integer"},
                "failed": {"type": "integer"},
                "ok": {"type": "boolean"},
            },
        },
    },
}


def ensure_valid(schema, obj, name="payload"):
    try:
        Draft202012Validator(schema).validate(obj)
    except ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{name} is invalid at {where}: {e.message}") from e
    return obj
