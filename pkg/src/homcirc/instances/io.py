"""Versioned JSON instance files and plain circulation files.

Canonical form: sorted keys, two-space indent, trailing newline, rationals as
``"p"`` or ``"p/q"`` in lowest terms, ``y`` listing only non-zero arcs.
Writing a parsed canonical file reproduces it byte for byte.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from ..embedding import END_NAMES, EmbeddedDigraph
from ..errors import InvalidInstance, ParseError, SchemaVersionMismatch

VERSION = "homcirc-v1"
TOP_FIELDS = {"version", "nodes", "arcs", "rotation", "signature", "y", "meta"}
REQUIRED = {"version", "nodes", "arcs", "rotation"}
ARC_FIELDS = {"id", "tail", "head", "cost"}
DART_FIELDS = {"arc", "end"}


@dataclass
class Instance:
    graph: EmbeddedDigraph
    y: list[int]
    meta: dict = field(default_factory=dict)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError("expected a rational", field=where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"expected a rational 'p/q', got {value!r}", field=where)


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", field=where)
    return value


def _loads_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None


# -- instances ---------------------------------------------------------------------


def instance_to_json(G: EmbeddedDigraph, y: Sequence[int] | None = None, meta: Mapping | None = None) -> dict:
    obj = {
        "version": VERSION,
        "nodes": list(G.nodes),
        "arcs": [
            {"id": aid, "tail": t, "head": h, "cost": format_rational(c)}
            for (aid, t, h), c in zip(G.arc_triples(), G.cost)
        ],
        "rotation": {
            node: [{"arc": aid, "end": END_NAMES[end]} for aid, end in darts]
            for node, darts in G.rotation_map().items()
        },
        "signature": G.signature_map(),
        "y": {aid: int(v) for aid, v in zip(G.arc_ids, y or ()) if v},
    }
    if meta:
        obj["meta"] = dict(meta)
    return obj


def dumps_instance(G: EmbeddedDigraph, y: Sequence[int] | None = None, meta: Mapping | None = None) -> str:
    return dumps_canonical(instance_to_json(G, y, meta))


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def instance_from_json(obj) -> Instance:
    if not isinstance(obj, dict):
        raise ParseError("instance must be a JSON object")
    unknown = set(obj) - TOP_FIELDS
    if unknown:
        raise ParseError("unknown field", field=sorted(unknown)[0])
    missing = REQUIRED - set(obj)
    if missing:
        raise ParseError("missing field", field=sorted(missing)[0])
    if obj["version"] != VERSION:
        raise SchemaVersionMismatch(f"expected version {VERSION!r}, got {obj['version']!r}", field="version")

    nodes = obj["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in nodes):
        raise ParseError("nodes must be a list of ids", field="nodes")

    if not isinstance(obj["arcs"], list):
        raise ParseError("arcs must be a list", field="arcs")
    arcs, costs = [], {}
    for i, arc in enumerate(obj["arcs"]):
        where = f"arcs[{i}]"
        if not isinstance(arc, dict):
            raise ParseError("arc must be an object", field=where)
        extra = set(arc) - ARC_FIELDS
        if extra:
            raise ParseError("unknown field", field=f"{where}.{sorted(extra)[0]}")
        for key in ("id", "tail", "head"):
            if key not in arc:
                raise ParseError("missing field", field=f"{where}.{key}")
        aid = str(arc["id"])
        arcs.append((aid, arc["tail"], arc["head"]))
        if "cost" in arc:
            costs[aid] = parse_rational(arc["cost"], f"{where}.cost")

    rot = obj["rotation"]
    if not isinstance(rot, dict):
        raise ParseError("rotation must be an object", field="rotation")
    rotation = {}
    for node, darts in rot.items():
        where = f"rotation.{node}"
        if not isinstance(darts, list):
            raise ParseError("dart list expected", field=where)
        seq = []
        for j, dart in enumerate(darts):
            if not isinstance(dart, dict) or set(dart) != DART_FIELDS:
                raise ParseError("dart must be {arc, end}", field=f"{where}[{j}]")
            if dart["end"] not in ("tail", "head"):
                raise ParseError("end must be 'tail' or 'head'", field=f"{where}[{j}].end")
            seq.append((str(dart["arc"]), dart["end"]))
        rotation[node] = seq

    sig_obj = obj.get("signature", {})
    if not isinstance(sig_obj, dict):
        raise ParseError("signature must be an object", field="signature")
    signature = {}
    for aid, s in sig_obj.items():
        if isinstance(s, bool) or s not in (1, -1):
            raise ParseError(f"signature must be +1 or -1, got {s!r}", field=f"signature.{aid}")
        signature[aid] = s

    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise ParseError("meta must be an object", field="meta")

    try:
        G = EmbeddedDigraph(nodes, arcs, rotation, signature, costs)
    except InvalidInstance as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from None
    y = read_vector(obj.get("y", {}), G, "y")
    return Instance(G, y, meta)


def read_vector(mapping, G: EmbeddedDigraph, where: str) -> list[int]:
    if not isinstance(mapping, dict):
        raise ParseError("expected an object mapping arc ids to integers", field=where)
    vec = [0] * G.n_arcs
    for aid, v in mapping.items():
        if aid not in G.arc_index:
            raise ParseError("unknown arc", field=f"{where}.{aid}")
        vec[G.arc_index[aid]] = _int(v, f"{where}.{aid}")
    return vec


def loads_instance(text: str) -> Instance:
    return instance_from_json(_loads_json(text))


def read_instance(path) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads_instance(text)


def write_instance(path, G: EmbeddedDigraph, y: Sequence[int] | None = None, meta: Mapping | None = None) -> None:
    Path(path).write_text(dumps_instance(G, y, meta), encoding="utf-8")


# -- circulations ---------------------------------------------------------------------


def read_circulation(path, G: EmbeddedDigraph) -> list[int]:
    """A circulation file is a JSON object ``{arc_id: int}``; absent arcs are 0."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return read_vector(_loads_json(text), G, str(path))


def circulation_to_json(G: EmbeddedDigraph, x: Sequence[int]) -> dict:
    return {aid: int(v) for aid, v in zip(G.arc_ids, x)}
