"""JSON documents: parsing with schema checks and canonical serialization.

Element paths are written as dash-joined indices (``"0-2-1"``; the empty
string is the root of a truss).  Over a named base, an element is written
``"base:indices"``.  Bordisms are keyed ``"source>target"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import jsonschema

from .errors import SchemaError, TrussError, ValidationError
from .poset import Poset, sort_key
from .strat import StratTruss
from .tangle import TanglePresentation
from .truss import POINT, TrussBundle

FORMAT_VERSION = 1
KINDS = ("poset", "truss", "strat", "tangle", "bundle", "certificate")

_PAIRS = {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}}
_POSET = {
    "type": "object",
    "required": ["elements", "covers"],
    "properties": {
        "elements": {"type": "array", "items": {"type": "string"}},
        "covers": {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}},
    },
}
_LEVEL = {
    "type": "object",
    "required": ["fibers", "bordisms"],
    "properties": {
        "fibers": {"type": "object", "additionalProperties": {"type": "string"}},
        "bordisms": {"type": "object", "additionalProperties": _PAIRS},
    },
    "additionalProperties": False,
}
SCHEMA = {
    "type": "object",
    "required": ["kind", "format_version"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "format_version": {"const": FORMAT_VERSION},
        "n": {"type": "integer", "minimum": 0},
        "base": _POSET,
        "levels": {"type": "array", "items": _LEVEL},
        "label_poset": _POSET,
        "labeling": {"type": "object", "additionalProperties": {"type": "string"}},
        "Q": {"type": "array", "items": {"type": "string"}},
        "m": {"type": "integer", "minimum": 0},
        "elements": {"type": "array", "items": {"type": "string"}},
        "covers": {"type": "array"},
        "name": {"type": "string"},
        "description": {"type": "string"},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"enum": ["truss", "strat", "tangle", "bundle", "certificate"]}}},
         "then": {"required": ["n", "levels"]}},
        {"if": {"properties": {"kind": {"const": "strat"}}}, "then": {"required": ["label_poset", "labeling"]}},
        {"if": {"properties": {"kind": {"enum": ["tangle", "certificate"]}}}, "then": {"required": ["Q", "m"]}},
        {"if": {"properties": {"kind": {"enum": ["bundle", "certificate"]}}}, "then": {"required": ["base", "Q", "m"]}},
        {"if": {"properties": {"kind": {"const": "poset"}}}, "then": {"required": ["elements", "covers"]}},
    ],
}


@dataclass(frozen=True)
class Document:
    kind: str
    payload: Any
    format_version: int = FORMAT_VERSION
    name: str = ""
    description: str = ""


# -- element keys --------------------------------------------------------------


def pathkey(x: tuple, base_len: int = 0) -> str:
    idx = "-".join(str(i) for i in x[base_len:])
    if base_len == 0:
        return idx
    return f"{x[0]}:{idx}"


def parse_pathkey(key: str, named_base: bool) -> tuple:
    if named_base:
        if ":" not in key:
            raise ValueError(f"element key {key!r} lacks a base prefix")
        b, rest = key.split(":", 1)
        head: tuple = (b,)
    else:
        head, rest = (), key
    if rest == "":
        return head
    return head + tuple(int(t) for t in rest.split("-"))


def coverkey(p: tuple, q: tuple, base_len: int) -> str:
    return f"{pathkey(p, base_len)}>{pathkey(q, base_len)}"


# -- encoding ------------------------------------------------------------------


def _poset_obj(P: Poset) -> dict:
    return {"elements": [str(x) for x in P.elements], "covers": [[str(a), str(b)] for a, b in P.sorted_covers]}


def _base_obj(P: Poset) -> dict:
    return {"elements": [x[0] for x in P.elements], "covers": [[a[0], b[0]] for a, b in P.sorted_covers]}


def _bundle_obj(B: TrussBundle) -> dict:
    bl = B.base_len
    levels = []
    for lvl in B.levels:
        levels.append(
            {
                "fibers": {pathkey(p, bl): w for p, w in lvl.fibers.items()},
                "bordisms": {coverkey(p, q, bl): sorted([a, b] for a, b in pairs) for (p, q), pairs in lvl.bordisms.items()},
            }
        )
    obj: dict = {"n": B.n, "levels": levels}
    if not B.is_truss:
        obj["base"] = _base_obj(B.base)
    return obj


def encode(doc: Document) -> dict:
    p = doc.payload
    obj: dict = {"kind": doc.kind, "format_version": doc.format_version}
    if doc.name:
        obj["name"] = doc.name
    if doc.description:
        obj["description"] = doc.description
    if doc.kind == "poset":
        obj.update(_poset_obj(p))
    elif doc.kind == "truss":
        obj.update(_bundle_obj(p))
    elif doc.kind == "strat":
        B = p.bundle
        obj.update(_bundle_obj(B))
        obj["label_poset"] = _poset_obj(p.label_poset)
        obj["labeling"] = {pathkey(x, B.base_len): str(v) for x, v in p.labeling.items()}
    elif doc.kind in ("tangle", "bundle", "certificate"):
        B = p.bundle.bundle if doc.kind == "certificate" else p.bundle
        obj.update(_bundle_obj(B))
        obj["Q"] = sorted((pathkey(x, B.base_len) for x in p.Q), key=str)
        obj["m"] = p.m
    else:
        raise SchemaError(f"unknown kind {doc.kind!r}", "/kind")
    return obj


def serialize(doc: Document) -> bytes:
    return (json.dumps(encode(doc), sort_keys=True, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


# -- decoding ------------------------------------------------------------------


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def _decode_poset(obj: dict, where: str) -> Poset:
    elems = obj["elements"]
    if len(set(elems)) != len(elems):
        raise SchemaError("duplicate elements", f"{where}/elements")
    try:
        return Poset.from_relations(elems, [tuple(c) for c in obj["covers"]])
    except TrussError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _decode_bundle(obj: dict) -> TrussBundle:
    if "base" in obj:
        raw = _decode_poset(obj["base"], "/base")
        base = Poset.from_relations([(x,) for x in raw], [((a,), (b,)) for a, b in raw.covers])
        named = True
    else:
        base, named = POINT, False
    if obj["n"] != len(obj["levels"]):
        raise SchemaError("n does not match the number of levels", "/n")
    levels = []
    for i, lvl in enumerate(obj["levels"]):
        try:
            fibers = {parse_pathkey(k, named): w for k, w in lvl["fibers"].items()}
            bordisms = {}
            for k, pairs in lvl["bordisms"].items():
                if ">" not in k:
                    raise ValueError(f"bordism key {k!r} lacks '>'")
                a, b = k.split(">", 1)
                bordisms[(parse_pathkey(a, named), parse_pathkey(b, named))] = [tuple(x) for x in pairs]
        except ValueError as exc:
            raise SchemaError(str(exc), f"/levels/{i}") from None
        levels.append((fibers, bordisms))
    try:
        return TrussBundle.build(base, levels)
    except TrussError as exc:
        raise ValidationError(str(exc)) from None
    except IndexError as exc:
        raise ValidationError(f"bordism pair out of range: {exc}") from None


def decode(obj: Any) -> Document:
    try:
        jsonschema.validate(obj, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message, _pointer(exc.absolute_path)) from None
    kind = obj["kind"]
    meta = {"name": obj.get("name", ""), "description": obj.get("description", "")}
    if kind == "poset":
        return Document(kind, _decode_poset(obj, ""), **meta)
    B = _decode_bundle(obj)
    named = not B.is_truss
    if kind == "truss":
        return Document(kind, B, **meta)
    if kind == "strat":
        labels = _decode_poset(obj["label_poset"], "/label_poset")
        try:
            labeling = {parse_pathkey(k, named): v for k, v in obj["labeling"].items()}
            return Document(kind, StratTruss(B, labels, labeling), **meta)
        except (TrussError, ValueError) as exc:
            raise ValidationError(str(exc)) from None
    try:
        Q = frozenset(parse_pathkey(k, named) for k in obj["Q"])
    except ValueError as exc:
        raise SchemaError(str(exc), "/Q") from None
    try:
        if kind == "tangle":
            return Document(kind, TanglePresentation(B, Q, obj["m"]), **meta)
        from .explore import PerturbationCertificate, TangleBundle

        TB = TangleBundle(B, Q, obj["m"])
        if kind == "bundle":
            return Document(kind, TB, **meta)
        return Document(kind, PerturbationCertificate(TB), **meta)
    except TrussError as exc:
        raise ValidationError(str(exc)) from None


def parse(data: bytes | str) -> Document:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc.msg} at line {exc.lineno}", "") from None
    return decode(obj)


def load(path) -> Document:
    with open(path, "rb") as fh:
        return parse(fh.read())


def dump(doc: Document, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(doc))


def document_for(obj: Any, name: str = "", description: str = "") -> Document:
    """Wrap a library object in a document of the matching kind."""
    from .explore import PerturbationCertificate, TangleBundle

    if isinstance(obj, Poset):
        kind = "poset"
    elif isinstance(obj, TrussBundle):
        kind = "truss"
    elif isinstance(obj, StratTruss):
        kind = "strat"
    elif isinstance(obj, TanglePresentation):
        kind = "tangle"
    elif isinstance(obj, PerturbationCertificate):
        kind = "certificate"
    elif isinstance(obj, TangleBundle):
        kind = "bundle"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return Document(kind, obj, name=name, description=description)


__all__ = ["Document", "parse", "serialize", "load", "dump", "document_for", "pathkey", "parse_pathkey", "sort_key"]
