"""Machine-readable run reports: stable serialization plus JSON schemas."""

from __future__ import annotations

import json
from typing import Any

__all__ = ["dumps_report", "BREAKDOWN_SCHEMA", "PROBE_REPORT_SCHEMA", "EVAL_REPORT_SCHEMA"]


def dumps_report(report: dict[str, Any]) -> str:
    """Deterministic JSON rendering: sorted keys, fixed separators, newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


BREAKDOWN_SCHEMA = {
    "type": "object",
    "required": ["kind", "min_support", "entries"],
    "properties": {
        "kind": {"enum": ["displacement", "span_length"]},
        "min_support": {"type": "integer", "minimum": 0},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["key", "f1", "support"],
                "properties": {
                    "key": {"type": "integer"},
                    "f1": {"type": "number", "minimum": 0, "maximum": 100},
                    "support": {"type": "integer", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

_SETUP_SCHEMA = {
    "type": "object",
    "required": ["score", "tag_accuracy", "breakdown"],
    "properties": {
        "score": {"type": "number", "minimum": 0, "maximum": 100},
        "tag_accuracy": {"type": "number", "minimum": 0, "maximum": 100},
        "breakdown": BREAKDOWN_SCHEMA,
    },
    "additionalProperties": False,
}

PROBE_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "formalism",
        "encoding",
        "metric",
        "config",
        "baseline_score",
        "setups",
        "error_reduction",
        "inputs",
        "seed",
    ],
    "properties": {
        "formalism": {"enum": ["dependency", "constituency"]},
        "encoding": {"enum": ["relhead", "2planar", "archybrid", "constlevels"]},
        "metric": {"enum": ["las", "bracket_f1"]},
        "seed": {"type": "integer"},
        "config": {
            "type": "object",
            "required": ["learning_rate", "epochs", "batch_size", "seed"],
            "properties": {
                "learning_rate": {"type": "number", "exclusiveMinimum": 0},
                "epochs": {"type": "integer", "minimum": 1},
                "batch_size": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "baseline_score": {"type": "number"},
        "setups": {
            "type": "object",
            "properties": {"frz": _SETUP_SCHEMA, "rnd": _SETUP_SCHEMA},
            "additionalProperties": False,
        },
        "error_reduction": {
            "type": "object",
            "properties": {
                "rnd_frz": {"type": "number"},
                "frz_ftd": {"type": "number"},
            },
            "additionalProperties": False,
        },
        "ftd_score": {"type": "number"},
        "inputs": {
            "type": "object",
            "required": ["train", "test"],
            "properties": {
                "train": {"type": "string"},
                "dev": {"type": ["string", "null"]},
                "test": {"type": "string"},
                "frz_embeddings": {"type": ["string", "null"]},
                "rnd_embeddings": {"type": ["string", "null"]},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

EVAL_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["formalism", "scores"],
    "properties": {
        "formalism": {"enum": ["dependency", "constituency"]},
        "scores": {
            "type": "object",
            "properties": {
                "las": {"type": "number"},
                "uas": {"type": "number"},
                "precision": {"type": "number"},
                "recall": {"type": "number"},
                "f1": {"type": "number"},
                "correct_both": {"type": "integer"},
                "correct_head": {"type": "integer"},
                "matched": {"type": "integer"},
                "predicted": {"type": "integer"},
                "gold": {"type": "integer"},
                "total": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "breakdown": BREAKDOWN_SCHEMA,
        "inputs": {
            "type": "object",
            "properties": {
                "gold": {"type": "string"},
                "pred": {"type": "string"},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}
