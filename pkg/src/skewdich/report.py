"""Deterministic JSON reports.

Floats are written as %.12e and non-finite values as the strings "inf",
"-inf" and "nan", so two runs on the same input give identical bytes.
Field order is the insertion order of the dicts handed in.
"""

from __future__ import annotations

import json
import math
from enum import Enum
from typing import Any

import jsonschema
import numpy as np

from . import __version__

FLOAT_FORMAT = "%.12e"

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["tool", "command", "instance", "grid", "result"],
    "properties": {
        "tool": {
            "type": "object",
            "required": ["name", "version"],
            "properties": {"name": {"type": "string"}, "version": {"type": "string"}},
        },
        "command": {"type": "string"},
        "instance": {"type": ["object", "null"]},
        "grid": {"type": ["object", "null"]},
        "result": {},
    },
}


def _float_text(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return FLOAT_FORMAT % x


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, Enum):
        return json.dumps(obj.value)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_text(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(k.value if isinstance(k, Enum) else str(k))}: {_encode(v, indent, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def make_report(command: str, instance: Any, grid: Any, result: Any, **extra: Any) -> dict[str, Any]:
    """Report envelope; ``extra`` fields go between the grid and the result."""
    report = {
        "tool": {"name": "skewdich", "version": __version__},
        "command": command,
        "instance": instance,
        "grid": grid,
    }
    report.update(extra)
    report["result"] = result
    return report


def validate(report_text: str) -> dict[str, Any]:
    """Parse a written report and check it against REPORT_SCHEMA."""
    obj = json.loads(report_text)
    jsonschema.validate(obj, REPORT_SCHEMA)
    return obj
