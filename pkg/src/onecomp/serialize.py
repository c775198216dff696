"""JSON form of inner-function specs and analysis reports.

A spec document is either a bare node or ``{"function": node, ...}``
with optional ``name`` and ``eta`` fields.  Nodes carry a ``kind``
discriminator; complex numbers are ``[re, im]`` pairs.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any

import jsonschema

from .errors import DomainError, SpecError
from .inner import (
    Compose,
    FiniteBlaschke,
    FrostmanShift,
    InfiniteBlaschke,
    InnerSpec,
    Product,
    SingularAtomic,
)
from .sequences import ZeroSequence

__all__ = [
    "SPEC_SCHEMA",
    "REPORT_SCHEMA",
    "SpecDocument",
    "spec_to_json",
    "spec_from_json",
    "load_spec",
    "dump_json",
    "canonical_json",
    "content_hash",
    "write_atomic",
]

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

SPEC_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {
        "complex": _COMPLEX,
        "sequence": {
            "type": "object",
            "required": ["generator"],
            "additionalProperties": False,
            "properties": {
                "generator": {"type": "string"},
                "params": {"type": "object"},
                "budget": {"type": ["integer", "null"], "minimum": 1},
            },
        },
        "node": {
            "type": "object",
            "required": ["kind"],
            "oneOf": [
                {
                    "properties": {
                        "kind": {"const": "finite_blaschke"},
                        "zeros": {"type": "array", "items": {"$ref": "#/$defs/complex"}},
                        "factor": {"$ref": "#/$defs/complex"},
                    },
                    "required": ["zeros"],
                    "additionalProperties": False,
                },
                {
                    "properties": {
                        "kind": {"const": "infinite_blaschke"},
                        "sequence": {"$ref": "#/$defs/sequence"},
                        "terms": {"type": ["integer", "null"], "minimum": 1},
                    },
                    "required": ["sequence"],
                    "additionalProperties": False,
                },
                {
                    "properties": {
                        "kind": {"const": "singular"},
                        "atoms": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "object",
                                "required": ["point", "mass"],
                                "additionalProperties": False,
                                "properties": {
                                    "point": {"$ref": "#/$defs/complex"},
                                    "mass": {"type": "number", "exclusiveMinimum": 0},
                                },
                            },
                        },
                    },
                    "required": ["atoms"],
                    "additionalProperties": False,
                },
                {
                    "properties": {
                        "kind": {"const": "product"},
                        "factors": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/node"}},
                    },
                    "required": ["factors"],
                    "additionalProperties": False,
                },
                {
                    "properties": {
                        "kind": {"const": "compose"},
                        "outer": {"$ref": "#/$defs/node"},
                        "inner": {"$ref": "#/$defs/node"},
                    },
                    "required": ["outer", "inner"],
                    "additionalProperties": False,
                },
                {
                    "properties": {
                        "kind": {"const": "frostman"},
                        "base": {"$ref": "#/$defs/node"},
                        "a": {"$ref": "#/$defs/complex"},
                    },
                    "required": ["base", "a"],
                    "additionalProperties": False,
                },
            ],
        },
    },
    "oneOf": [
        {"$ref": "#/$defs/node"},
        {
            "type": "object",
            "required": ["function"],
            "additionalProperties": False,
            "properties": {
                "function": {"$ref": "#/$defs/node"},
                "name": {"type": "string"},
                "eta": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
            },
        },
    ],
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "name", "spec", "spec_sha256", "constants", "verdicts", "threshold", "ladder", "criterion", "provenance", "timing",
    ],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "spec": {"type": "object"},
        "spec_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "constants": {"type": "array", "items": {"type": "object"}},
        "verdicts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["verdict", "eta", "r_max", "terms", "margin", "witnesses"],
                "properties": {
                    "verdict": {"enum": ["connected", "disconnected", "unresolved"]},
                    "eta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                    "r_max": {"type": "number", "exclusiveMaximum": 1},
                    "terms": {"type": "object"},
                    "margin": {
                        "type": "object",
                        "required": ["rho_floor", "margin_scale", "truncation_bound"],
                    },
                    "witnesses": {"type": "array"},
                },
            },
        },
        "threshold": {"type": ["object", "null"]},
        "ladder": {"type": ["object", "null"]},
        "criterion": {"type": "object", "required": ["status", "label"]},
        "note": {"type": "string"},
        "provenance": {
            "type": "object",
            "required": ["tool", "version", "policy"],
        },
        "timing": {"type": "object"},
    },
}


def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def spec_to_json(u: InnerSpec) -> dict[str, Any]:
    if isinstance(u, FiniteBlaschke):
        return {"kind": "finite_blaschke", "zeros": [_pair(a) for a in u.zeros], "factor": _pair(u.factor)}
    if isinstance(u, InfiniteBlaschke):
        return {"kind": "infinite_blaschke", "sequence": u.sequence.to_json(), "terms": u.terms}
    if isinstance(u, SingularAtomic):
        return {"kind": "singular", "atoms": [{"point": _pair(p), "mass": m} for p, m in u.atoms]}
    if isinstance(u, Product):
        return {"kind": "product", "factors": [spec_to_json(f) for f in u.factors]}
    if isinstance(u, Compose):
        return {"kind": "compose", "outer": spec_to_json(u.outer), "inner": spec_to_json(u.inner)}
    if isinstance(u, FrostmanShift):
        return {"kind": "frostman", "base": spec_to_json(u.base), "a": _pair(u.a)}
    raise SpecError(f"cannot serialize {type(u).__name__}")


def _build(node: dict) -> InnerSpec:
    kind = node["kind"]
    if kind == "finite_blaschke":
        return FiniteBlaschke(tuple(_complex(a) for a in node["zeros"]), _complex(node.get("factor", [1.0, 0.0])))
    if kind == "infinite_blaschke":
        return InfiniteBlaschke(ZeroSequence.from_json(node["sequence"]), node.get("terms"))
    if kind == "singular":
        return SingularAtomic(tuple((_complex(a["point"]), float(a["mass"])) for a in node["atoms"]))
    if kind == "product":
        return Product(tuple(_build(f) for f in node["factors"]))
    if kind == "compose":
        return Compose(_build(node["outer"]), _build(node["inner"]))
    if kind == "frostman":
        return FrostmanShift(_build(node["base"]), _complex(node["a"]))
    raise SpecError(f"unknown kind {kind!r}")


class SpecDocument:
    """A parsed spec file: the function plus optional name and eta list."""

    def __init__(self, function: InnerSpec, name: str = "function", eta: tuple[float, ...] = ()):
        self.function = function
        self.name = name
        self.eta = tuple(float(e) for e in eta)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"function": spec_to_json(self.function), "name": self.name}
        if self.eta:
            out["eta"] = list(self.eta)
        return out


def spec_from_json(obj: Any) -> SpecDocument:
    """Validate and build a spec document; every failure is a ``SpecError``."""
    try:
        jsonschema.validate(obj, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SpecError(f"spec does not match the schema: {exc.message}") from None
    node = obj if "kind" in obj else obj["function"]
    try:
        fn = _build(node)
    except (DomainError, ValueError, TypeError) as exc:
        raise SpecError(str(exc)) from None
    if "kind" in obj:
        return SpecDocument(fn)
    return SpecDocument(fn, obj.get("name", "function"), tuple(obj.get("eta", ())))


def load_spec(path) -> SpecDocument:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return spec_from_json(obj)


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def content_hash(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def dump_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_atomic(path, data: bytes | str) -> Path:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
