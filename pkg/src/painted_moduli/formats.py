"""Text, JSON, DOT and CSV forms of painted sets, partitions, trees and ring elements."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .algebra import Monomial, RingElement
from .core import BLACK, WHITE, Color, Label, PaintedSet, TwoPartition, lowest_bit, popcount
from .trees import PaintedTree, check_tree


class ParseError(ValueError):
    pass


# -- painted sets ------------------------------------------------------------

def parse_painted_set(text: str) -> PaintedSet:
    text = text.strip()
    if not text:
        raise ParseError("empty painted set")
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return painted_set_from_json(doc)
    bad = set(text.lower()) - {"w", "b"}
    if bad:
        raise ParseError(f"invalid character(s) {''.join(sorted(bad))!r} in painted word")
    return PaintedSet.from_word(text.lower())


def painted_set_from_json(doc: Any) -> PaintedSet:
    if isinstance(doc, str):
        return parse_painted_set(doc)
    try:
        labels = [Label(str(d["name"]), Color.parse(d["color"])) for d in doc["labels"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed painted set document: {exc}") from None
    if not labels:
        raise ParseError("empty painted set")
    try:
        return PaintedSet(tuple(labels))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def painted_set_to_json(S: PaintedSet) -> dict:
    return {"labels": [{"name": lab.name, "color": "white" if lab.color is WHITE else "black"}
                       for lab in S]}


def is_default_named(S: PaintedSet) -> bool:
    return S.names == tuple(str(i + 1) for i in range(len(S)))


def painted_set_text(S: PaintedSet) -> str:
    return S.word if is_default_named(S) else json.dumps(painted_set_to_json(S), sort_keys=True)


# -- partitions and trees ------------------------------------------------------

def _parse_part(S: PaintedSet, text: str) -> int:
    text = text.strip()
    tokens = text.split(",") if ("," in text or len(S) > 9) else list(text)
    mask = 0
    for tok in tokens:
        tok = tok.strip()
        if not tok:
            continue
        try:
            i = int(tok) - 1
        except ValueError:
            raise ParseError(f"bad label index {tok!r}") from None
        if not 0 <= i < len(S):
            raise ParseError(f"label index {tok} out of range")
        if mask >> i & 1:
            raise ParseError(f"label index {tok} repeated")
        mask |= 1 << i
    return mask


def parse_partition(S: PaintedSet, text: str) -> TwoPartition:
    pieces = text.split("|")
    if len(pieces) != 2:
        raise ParseError(f"partition {text!r} must have exactly two parts")
    p, q = (_parse_part(S, x) for x in pieces)
    if p & q or (p | q) != S.full or not p or not q:
        raise ParseError(f"{text!r} is not a 2-partition of {len(S)} labels")
    return TwoPartition(S, p)


def parse_tree(S: PaintedSet, text: str) -> PaintedTree:
    text = text.strip()
    if text in ("", "*"):
        return PaintedTree.one_vertex(S)
    parts = [parse_partition(S, x) for x in text.split(";") if x.strip()]
    try:
        return check_tree(S, [p.mask for p in parts])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def tree_to_json(tau: PaintedTree) -> dict:
    return {"set": painted_set_text(tau.pset), "partitions": [str(p) for p in tau.partitions()]}


def tree_to_dot(tau: PaintedTree) -> str:
    S = tau.pset
    lines = ["graph tree {", "  node [shape=circle, label=\"\"];"]
    vid = {v: f"v{n}" for n, v in enumerate(tau.vertices)}
    for v, name in vid.items():
        lines.append(f"  {name};")
    for v, name in vid.items():
        for b in v:
            if popcount(b) == 1:
                i = lowest_bit(b)
                lab = S.labels[i]
                style = "filled, fillcolor=black, fontcolor=white" if lab.color is BLACK else "solid"
                lines.append(f"  t{i} [shape=circle, width=0.3, style=\"{style}\", label=\"{lab.name}\"];")
                lines.append(f"  {name} -- t{i};")
    for m in tau.edges:
        a = vid[tau.vertex_with_branch(S.full ^ m)]
        b = vid[tau.vertex_with_branch(m)]
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- ring elements --------------------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*((?:\[[^\]]*\](?:\^[0-9]+)?)*)\s*")
_FACTOR = re.compile(r"\[([^\]]*)\](?:\^([0-9]+))?")


def parse_monomial(S: PaintedSet, text: str) -> Monomial:
    out = []
    for body, exp in _FACTOR.findall(text):
        if not body.strip():
            continue
        sigma = parse_partition(S, body)
        out.extend([sigma.mask] * int(exp or 1))
    return tuple(sorted(out))


def parse_ring_element(S: PaintedSet, text: str) -> RingElement:
    """Parse e.g. ``"1 * [12|345] - 1/2 * [23|145][123|45]"``; ``[]`` or a bare number is the unit."""
    text = text.strip()
    if text == "0":
        return RingElement.zero(S)
    terms: dict = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse ring element near {text[pos:]!r}")
        sign, coeff, mono = m.groups()
        if not first and sign is None:
            raise ParseError(f"missing sign near {text[pos:]!r}")
        if coeff is None and not mono:
            raise ParseError(f"empty term near {text[pos:]!r}")
        c = Fraction(coeff) if coeff else Fraction(1)
        if sign == "-":
            c = -c
        key = parse_monomial(S, mono)
        terms[key] = terms.get(key, 0) + c
        pos = m.end()
        first = False
    x = RingElement(S, terms)
    trees = _good_monomials(S, x)
    return RingElement(S, x.terms, good=trees)


def _good_monomials(S: PaintedSet, x: RingElement) -> bool:
    for m in x.terms:
        if len(set(m)) != len(m):
            return False
        try:
            check_tree(S, m)
        except ValueError:
            return False
    return True


def element_to_json(x: RingElement) -> dict:
    return {
        "set": painted_set_text(x.pset),
        "terms": [[[str(TwoPartition(x.pset, p)) for p in m], c.numerator, c.denominator]
                  for m, c in x.sorted_terms()],
    }


def element_from_json(doc: dict, S: PaintedSet | None = None) -> RingElement:
    if S is None:
        S = painted_set_from_json(doc["set"]) if not isinstance(doc["set"], str) else parse_painted_set(doc["set"])
    terms: dict = {}
    for mono, num, den in doc["terms"]:
        key = tuple(sorted(parse_partition(S, p).mask for p in mono))
        terms[key] = terms.get(key, 0) + Fraction(num, den)
    x = RingElement(S, terms)
    return RingElement(S, x.terms, good=_good_monomials(S, x))


# -- export ---------------------------------------------------------------------

@dataclass(frozen=True)
class HilbertSeries:
    word: str
    dims: tuple


def hilbert_csv(rows: list[tuple[str, list[int]]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["S", "d", "dim"])
    for word, h in rows:
        for d, dim in enumerate(h):
            w.writerow([word, d, dim])
    return buf.getvalue()


def export(obj: Any, fmt: str) -> bytes:
    """Deterministic serialisation of a tree, partition list, ring element, Hilbert series or report."""
    if fmt not in ("json", "dot", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, PaintedTree):
        if fmt == "dot":
            return tree_to_dot(obj).encode()
        if fmt == "json":
            return _dumps(tree_to_json(obj))
    elif isinstance(obj, RingElement):
        if fmt == "json":
            return _dumps(element_to_json(obj))
    elif isinstance(obj, list) and all(isinstance(p, TwoPartition) for p in obj):
        if fmt == "json":
            return _dumps([str(p) for p in obj])
        if fmt == "csv":
            return "".join(f"{p}\n" for p in ["partition"] + [str(p) for p in obj]).encode()
    elif isinstance(obj, HilbertSeries):
        if fmt == "csv":
            return hilbert_csv([(obj.word, obj.dims)]).encode()
        if fmt == "json":
            return _dumps({"set": obj.word, "dims": list(obj.dims)})
    elif isinstance(obj, (dict, list)):
        if fmt == "json":
            return _dumps(obj)
    raise ValueError(f"cannot export {type(obj).__name__} as {fmt}")


def _dumps(doc: Any) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()
