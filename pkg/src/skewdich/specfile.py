"""Instance-spec JSON files: schema, loading, and conversion to gallery instances."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import jsonschema

from .base_space import DEFAULT_GENERATOR, GeneratorSpec
from .cocycles import DiagonalCocycle
from .dichotomy import DichotomyClass
from .expressions import KINDS, Expression
from .gallery import Instance
from .projectors import coordinate_pair, pair_from_matrix

_TERM = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "coef": {"type": "number"},
        "coeffs": {"type": "array", "items": {"type": "number"}},
        "power": {"type": "number"},
        "shift": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}
_EXPRESSION = {"type": "array", "items": _TERM}
_MATRIX = {
    "type": "array", "minItems": 2, "maxItems": 2,
    "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
}

INSTANCE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["name", "h1", "h2"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "generator": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["one_plus_exp_neg", "reciprocal_shift", "constant"]}},
            "additionalProperties": {"type": "number"},
        },
        "h1": _EXPRESSION,
        "h2": _EXPRESSION,
        "c1": {"type": "number"},
        "c2": {"type": "number"},
        "lambda": {"type": "number"},
        "projectors": {
            "oneOf": [
                {"const": "coordinate"},
                {"type": "object", "required": ["matrix"], "properties": {"matrix": _MATRIX},
                 "additionalProperties": False},
            ]
        },
        "gauge_hint": _EXPRESSION,
        "claimed": {
            "type": "object",
            "propertyNames": {"enum": [c.value for c in DichotomyClass]},
            "additionalProperties": {"type": "boolean"},
        },
    },
    "additionalProperties": False,
}


class SpecError(ValueError):
    """The instance file does not parse or does not match the schema."""


def instance_from_json(obj: Any) -> Instance:
    try:
        jsonschema.validate(obj, INSTANCE_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecError(f"instance spec invalid at {where}: {exc.message}") from None
    try:
        generator = GeneratorSpec.from_json(obj["generator"]) if "generator" in obj else DEFAULT_GENERATOR
        cocycle = DiagonalCocycle(
            Expression.from_json(obj["h1"]),
            Expression.from_json(obj["h2"]),
            float(obj.get("c1", 0.0)),
            float(obj.get("c2", 0.0)),
            float(obj.get("lambda", 0.0)),
        )
        proj = obj.get("projectors", "coordinate")
        pair = coordinate_pair() if proj == "coordinate" else pair_from_matrix(proj["matrix"])
    except (TypeError, ValueError) as exc:
        raise SpecError(f"instance spec invalid: {exc}") from None
    return Instance(
        obj["name"],
        obj.get("description", ""),
        cocycle,
        generator,
        pair,
        claimed={DichotomyClass(k): v for k, v in obj.get("claimed", {}).items()},
        hint=Expression.from_json(obj.get("gauge_hint", [])),
    )


def load_instance(path: Union[str, Path]) -> Instance:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: not JSON ({exc.msg} at line {exc.lineno})") from None
    return instance_from_json(obj)
