"""Model files: schema validation and construction of the in-memory objects."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .lambda_map import LambdaMap, NonConstantVImage
from .symplectic import QuasifreeSpec
from .tails import TailFamily
from .truncation import TruncationScheme

SUITES = ("ccr", "standard_form", "generator", "weyl", "symplectic", "equivalence")

_num = {"oneOf": [{"type": "number"}, {"type": "string"}]}
_wick = {
    "type": "object",
    "additionalProperties": False,
    "required": ["terms"],
    "properties": {"terms": {"type": "array", "items": {
        "type": "object",
        "additionalProperties": False,
        "required": ["modes"],
        "properties": {
            "modes": {"type": "array", "items": {
                "type": "array", "items": {"type": "integer", "minimum": 1},
                "minItems": 2, "maxItems": 2}},
            "re": _num, "im": _num}}}},
}
_rule = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["zero", "power_law", "custom"]},
        "c": _num, "p": _num, "value": _num,
        "summable": {"type": ["boolean", "null"]},
        "start": {"type": "integer", "minimum": 1},
        "relation": {"enum": ["eq", "le", "ge"]}},
}
_tail = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "explicit": {"type": "array", "items": {
            "type": "array", "prefixItems": [{"type": "integer", "minimum": 1}, _num],
            "minItems": 2, "maxItems": 2}},
        "rule": _rule},
}
_pair = lambda value: {"type": "array", "prefixItems": [{"type": "integer", "minimum": 1}, value],
                       "minItems": 2, "maxItems": 2}
_matrix = {"type": "array", "items": {"type": "array", "items": _num}}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["lambda"],
    "properties": {
        "lambda": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "degree": {"type": "integer", "minimum": 0},
                "v": {"type": "array", "items": _pair({"oneOf": [*_num["oneOf"], _wick]})},
                "jv": {"type": "array", "items": _pair(_wick)},
                "support": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "tail": {"oneOf": [_tail, {"type": "null"}]}}},
        "tail": _tail,
        "quasifree_spec": {
            "type": "object",
            "additionalProperties": False,
            "required": ["T"],
            "properties": {"basis": {"const": "q-then-p"}, "T": _matrix,
                           "l": {"type": "array", "items": _num}}},
        "truncation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "modes": {"type": "array", "items": {"type": "integer", "minimum": 1},
                          "minItems": 1},
                "cutoff": {"type": "integer", "minimum": 1},
                "probe_level": {"type": "integer", "minimum": 0},
                "cutoffs": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "dps": {"type": "integer", "minimum": 16}}},
        "suites": {"type": "array", "items": {"enum": [*SUITES, "all"]}},
    },
}


class ModelError(ValueError):
    """Model rejected; ``kind`` is ``parse``, ``schema`` or ``invariant``."""

    def __init__(self, kind: str, message: str, location=None):
        self.kind = kind
        self.location = location
        where = f" at {location}" if location is not None else ""
        super().__init__(f"{kind} error{where}: {message}")


@dataclass(frozen=True)
class TruncationSettings:
    modes: tuple[int, ...] = (1,)
    cutoff: int = 60
    probe_level: int = 5
    cutoffs: tuple[int, ...] = ()
    dps: int = 80

    def scheme(self, cutoff: int | None = None) -> TruncationScheme:
        return TruncationScheme(self.modes, cutoff or self.cutoff, self.probe_level)


@dataclass(frozen=True, eq=False)
class ModelFile:
    lam: LambdaMap
    tail: TailFamily | None = None
    quasifree_spec: QuasifreeSpec | None = None
    truncation: TruncationSettings = field(default_factory=TruncationSettings)
    suites: tuple[str, ...] = ("all",)
    source: dict = field(default_factory=dict)


def parse_model(raw: bytes | str) -> ModelFile:
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ModelError("parse", "file is not UTF-8", f"byte {e.start}") from None
    else:
        text = raw
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[:e.pos].encode("utf-8"))
        raise ModelError("parse", e.msg, f"byte {offset}") from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda err: list(err.absolute_path))
    if errors:
        err = errors[0]
        path = "/" + "/".join(str(p) for p in err.absolute_path)
        raise ModelError("schema", err.message, path)
    return build_model(data)


def build_model(data: dict) -> ModelFile:
    try:
        lam = LambdaMap.from_json(data["lambda"])
    except NonConstantVImage as e:
        raise ModelError("invariant", f"{e}; Lambda must be a real constant on V "
                         "(lambda.ccr-characterization)", "/lambda/v") from None
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ModelError("invariant", str(e), "/lambda") from None
    tail = None
    if "tail" in data:
        try:
            tail = TailFamily.from_json(data["tail"])
        except (ValueError, TypeError) as e:
            raise ModelError("invariant", str(e), "/tail") from None
    spec = None
    if "quasifree_spec" in data:
        try:
            spec = QuasifreeSpec.from_json(data["quasifree_spec"])
        except (ValueError, TypeError, KeyError) as e:
            raise ModelError("invariant", str(e), "/quasifree_spec") from None
    tr = data.get("truncation", {})
    # one mode by default; several modes multiply the matrix size
    modes = tuple(tr.get("modes", lam.support[:1] or (1,)))
    settings = TruncationSettings(modes, tr.get("cutoff", 60), tr.get("probe_level", 5),
                                  tuple(tr.get("cutoffs", ())), tr.get("dps", 80))
    try:
        settings.scheme()
    except ValueError as e:
        raise ModelError("invariant", str(e), "/truncation") from None
    return ModelFile(lam, tail, spec, settings, tuple(data.get("suites", ("all",))), data)


def load_model(path) -> ModelFile:
    return parse_model(Path(path).read_bytes())
