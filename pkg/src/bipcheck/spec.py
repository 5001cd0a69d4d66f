"""Graph-spec documents: JSON text validated against the shipped schema, then built into graphs."""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from .errors import BipcheckError, InvalidDescriptor
from .graphs import (RegularMultigraph, automorphism_from_images, cayley, cayley_sum, from_action_graph,
                     twisted_cayley, twisted_cayley_sum)
from .groups import DEFAULT_ELEMENT_CAP, GroupTable, build_group, natural_action, regular_action, subset_action

SCHEMA_VERSION = 1


class SpecError(BipcheckError):
    """A spec document that cannot be parsed, validated or built; ``location`` says where."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
        self.message = message


@lru_cache(maxsize=1)
def graph_spec_schema() -> dict:
    text = resources.files("bipcheck").joinpath("schemas/graph_spec.schema.json").read_text()
    return json.loads(text)


def _line_of(text: str, path: list) -> int | None:
    """Best-effort line number of the last object key on ``path``."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(keys[-1]), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _field(path) -> str:
    out = "$"
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate_spec(doc: Any, text: str | None = None) -> dict:
    validator = jsonschema.Draft202012Validator(graph_spec_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        loc = f"field {_field(path)}"
        line = _line_of(text, path) if text else None
        if line is not None:
            loc = f"line {line}, {loc}"
        raise SpecError(err.message, loc)
    return doc


def parse_spec_text(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return validate_spec(doc, text)


def load_spec(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(str(exc), str(path)) from None
    return parse_spec_text(text)


def resolve_element(g: GroupTable, ref) -> int:
    """An element given by label, or by index (int, or a digit string that is not a label)."""
    if isinstance(ref, str):
        if ref in g.labels:
            return g.labels.index(ref)
        if ref.strip().lstrip("-").isdigit():
            ref = int(ref)
        else:
            raise InvalidDescriptor(f"unknown element label {ref!r} in {g.name}")
    if not 0 <= ref < g.order:
        raise InvalidDescriptor(f"element index {ref} out of range for {g.name}")
    return int(ref)


@dataclass
class BuiltSpec:
    spec: dict
    group: GroupTable
    graph: RegularMultigraph
    subset_cap: int | None = None
    ternary_cap: int | None = None


def build_graph(doc: dict) -> BuiltSpec:
    """Build the graph a validated spec describes; construction errors become ``SpecError``."""
    caps = doc.get("caps", {})
    try:
        g = build_group(doc["group"], cap=caps.get("elements", DEFAULT_ELEMENT_CAP))
        family = doc["family"]
        if family == "action_graph":
            act = doc.get("action", {"kind": "regular"})
            if act["kind"] == "regular":
                a = regular_action(g)
            elif act["kind"] == "natural":
                a = natural_action(g)
            else:
                if "k" not in act:
                    raise InvalidDescriptor("subsets action needs k")
                a = subset_action(g, act["k"])
            gr = from_action_graph(a, doc["base_edges"])
        else:
            s = [resolve_element(g, x) for x in doc["connection_set"]]
            if family == "cayley":
                gr = cayley(g, s)
            elif family == "cayley_sum":
                gr = cayley_sum(g, s)
            else:
                images = {resolve_element(g, k): resolve_element(g, v) for k, v in doc["automorphism"].items()}
                sigma = automorphism_from_images(g, images)
                builder = twisted_cayley if family == "twisted_cayley" else twisted_cayley_sum
                gr = builder(g, s, sigma)
    except BipcheckError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"{type(exc).__name__}: {exc}", "document") from exc
    return BuiltSpec(copy.deepcopy(doc), g, gr, caps.get("subset"), caps.get("ternary"))
