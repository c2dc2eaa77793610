"""Run configuration: JSON schema validation and canonical hashing.

Unknown keys are rejected everywhere except phantom.params, which is an
explicit pass-through bag for generator-specific knobs.
"""

from __future__ import annotations

import jsonschema

from . import io

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_RANGE2 = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["optical"],
    "properties": {
        "optical": {
            "type": "object",
            "additionalProperties": False,
            "required": ["wavelength_um", "pitch_um", "z2_um"],
            "properties": {
                "wavelength_um": _POS,
                "pitch_um": _POS,
                "z2_um": {"type": "number", "minimum": 0},
                "n0": _POS,
            },
        },
        "heights_um": {
            "type": "array", "items": {"type": "number", "minimum": 0},
            "minItems": 1,
        },
        "phantom": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["cells", "tissue", "text"]},
                "size": {"type": "integer", "minimum": 32},
                "seed": {"type": "integer", "minimum": 0},
                "target_scattering": _POS,
                "params": {"type": "object"},
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "photons": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "read_noise": {"type": "number", "minimum": 0},
            },
        },
        "shift_um": _RANGE2,
        "seed": {"type": "integer", "minimum": 0},
        "dataset": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "num_phantoms": {"type": "integer", "minimum": 1},
                "tiles_per_side": {"type": "integer", "minimum": 1},
                "overlap_px": {"type": "integer", "minimum": 0},
                "iterations": {"type": "integer", "minimum": 1},
            },
        },
    },
}

DEFAULTS = {
    "optical": {"wavelength_um": 0.53, "pitch_um": 1.12, "z2_um": 300.0, "n0": 1.0},
    "heights_um": [0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0, 180.0],
    # phantom.seed intentionally absent: it falls back to the run seed
    "phantom": {"kind": "cells", "size": 256},
    "shift_um": [0.0, 0.0],
    "seed": 0,
}


class ConfigError(ValueError):
    """Configuration failed schema validation."""


def validate(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from exc
    return cfg


def load(path) -> dict:
    """Read, merge defaults into, and validate a config file."""
    raw = io.read_json(path)
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    merged = {}
    for key, val in DEFAULTS.items():
        if isinstance(val, dict):
            merged[key] = {**val, **raw.get(key, {})}
        else:
            merged[key] = raw.get(key, val)
    for key in raw:
        if key not in merged:
            merged[key] = raw[key]
    return validate(merged)


def config_hash(cfg: dict) -> str:
    return io.sha256_json(cfg)
