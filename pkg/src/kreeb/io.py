"""JSON input and output for divisors and toric cones."""

from __future__ import annotations

import json
from typing import IO, Union

from .geometry import Cone, GeometryError
from .pdivisor import DivisorError, PolyhedralDivisor

Target = Union[PolyhedralDivisor, Cone]


class SchemaError(ValueError):
    pass


def from_json(data: dict) -> Target:
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object")
    kind = data.get("type")
    try:
        if kind == "pdivisor":
            return PolyhedralDivisor.from_json(data)
        if kind == "toric":
            return Cone.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, (GeometryError, DivisorError)):
            raise
        raise SchemaError(f"malformed {kind} input: {exc!r}") from exc
    raise SchemaError(f"unknown type {kind!r}; expected 'pdivisor' or 'toric'")


def to_json(X: Target) -> dict:
    if isinstance(X, PolyhedralDivisor):
        return X.to_json()
    return {"type": "toric", **X.to_json()}


def load(stream: IO[str]) -> Target:
    try:
        data = json.load(stream)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return from_json(data)


def dumps(X: Target) -> str:
    return json.dumps(to_json(X), indent=2, ensure_ascii=False)
