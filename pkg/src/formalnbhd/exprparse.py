"""Expressions and atlas documents.

Grammar of transition expressions::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' nat)?
    atom   := number | ident | '(' expr ')'

Numbers are exact: ``3``, ``0.25`` and ``3/4`` (the last as a division)
all denote rationals.  Division is allowed only by units, i.e. series whose
restriction to S is nonzero; it is then expanded as a truncated geometric
series.

Atlas documents are JSON objects with the fields ``name``, ``n``, ``m``,
``truncation_order``, ``charts`` (``id``, ``normal``, ``tangential``),
``overlaps`` (``from``, ``to``, ``components``) and the optional
``triples`` and ``metadata`` (``genus``, ``self_intersection``).
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

from .atlas import Atlas, Chart, ChartTransition
from .errors import (
    ExpressionSyntaxError,
    InputError,
    NotAUnitError,
    SchemaError,
    UnknownVariableError,
)
from .series import SeriesRing, TruncatedSeries

__all__ = [
    "Number",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "Group",
    "parse_ast",
    "evaluate_ast",
    "parse_expression",
    "parse_in_ring",
    "format_ast",
    "AtlasDocument",
    "ChartSpec",
    "OverlapSpec",
    "load_atlas",
    "atlas_to_document",
    "dump_atlas",
    "save_atlas",
]

MAX_EXPONENT = 1000
MAX_DEPTH = 200


# -- AST ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Number:
    value: Fraction
    offset: int = 0


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = 0


@dataclass(frozen=True)
class Neg:
    operand: Any
    offset: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any
    offset: int = 0


@dataclass(frozen=True)
class Pow:
    base: Any
    exponent: int
    offset: int = 0


@dataclass(frozen=True)
class Group:
    inner: Any
    offset: int = 0


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?|\.\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = mt.lastgroup
        tokens.append((kind, mt.group(kind), mt.start(kind)))
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.depth = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExpressionSyntaxError(f"expected {op!r}", off)
        self.take()

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, off = self.take()
            node = BinOp(op, node, self.term(), off)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, off = self.take()
            node = BinOp(op, node, self.factor(), off)
        return node

    def factor(self):
        minus = []
        while self.peek()[0] == "op" and self.peek()[1] == "-":
            minus.append(self.take()[2])
        node = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            _, _, off = self.take()
            kind, val, eoff = self.peek()
            if kind != "num" or not val.isdigit():
                raise ExpressionSyntaxError("exponent must be a nonnegative integer", eoff)
            self.take()
            e = int(val)
            if e > MAX_EXPONENT:
                raise ExpressionSyntaxError(f"exponent larger than {MAX_EXPONENT}", eoff)
            node = Pow(node, e, off)
        for off in reversed(minus):
            node = Neg(node, off)
        return node

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Number(Fraction(val), off)
        if kind == "ident":
            return Var(val, off)
        if kind == "op" and val == "(":
            self.depth += 1
            if self.depth > MAX_DEPTH:
                raise ExpressionSyntaxError("parentheses nested too deeply", off)
            inner = self.expr()
            self.expect_op(")")
            self.depth -= 1
            return Group(inner, off)
        if kind == "end":
            raise ExpressionSyntaxError("unexpected end of input", off)
        raise ExpressionSyntaxError(f"unexpected {val!r}", off)


def parse_ast(text: str):
    """Parse ``text`` into an AST; raises :class:`ExpressionSyntaxError`."""
    if not isinstance(text, str):
        raise ExpressionSyntaxError("expression must be a string", 0)
    return _Parser(text).parse()


def evaluate_ast(node, ring: SeriesRing) -> TruncatedSeries:
    """Evaluate an AST to a series in ``ring``."""
    stack_limit = MAX_DEPTH * 4

    def ev(nd, depth=0):
        if depth > stack_limit:
            raise ExpressionSyntaxError("expression nested too deeply", getattr(nd, "offset", 0))
        if isinstance(nd, Number):
            return ring.constant(nd.value)
        if isinstance(nd, Var):
            if nd.name not in ring.variables:
                raise UnknownVariableError(
                    f"unknown variable {nd.name!r} at offset {nd.offset}", offset=nd.offset, name=nd.name
                )
            return ring.gen(nd.name)
        if isinstance(nd, Group):
            return ev(nd.inner, depth + 1)
        if isinstance(nd, Neg):
            return -ev(nd.operand, depth + 1)
        if isinstance(nd, Pow):
            return ev(nd.base, depth + 1) ** nd.exponent
        if isinstance(nd, BinOp):
            a = ev(nd.left, depth + 1)
            b = ev(nd.right, depth + 1)
            if nd.op == "+":
                return a + b
            if nd.op == "-":
                return a - b
            if nd.op == "*":
                return a * b
            if not b.is_unit():
                raise NotAUnitError(
                    f"division by a non-unit (normal order {b.normal_order()}) at offset {nd.offset}",
                    offset=nd.offset,
                )
            return a * b.inverse()
        raise TypeError(f"not an expression node: {nd!r}")

    return ev(node)


def parse_in_ring(text: str, ring: SeriesRing) -> TruncatedSeries:
    return evaluate_ast(parse_ast(text), ring)


def parse_expression(text: str, chart: str, doc: Union["AtlasDocument", Atlas]) -> TruncatedSeries:
    """Parse ``text`` as a series in the variables of ``chart``."""
    if isinstance(doc, Atlas):
        ring = doc.ring(chart)
    else:
        spec = doc.chart(chart)
        ring = SeriesRing(spec.normal, spec.tangential, doc.truncation_order)
    return parse_in_ring(text, ring)


def format_ast(node) -> str:
    """Fully parenthesised rendering of an AST (used in tests)."""
    if isinstance(node, Number):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Group):
        return format_ast(node.inner)
    if isinstance(node, Neg):
        return f"(-{format_ast(node.operand)})"
    if isinstance(node, Pow):
        return f"({format_ast(node.base)}^{node.exponent})"
    if isinstance(node, BinOp):
        return f"({format_ast(node.left)}{node.op}{format_ast(node.right)})"
    raise TypeError(node)


# -- documents -----------------------------------------------------------------------
@dataclass(frozen=True)
class ChartSpec:
    id: str
    normal: tuple[str, ...]
    tangential: tuple[str, ...]


@dataclass(frozen=True)
class OverlapSpec:
    source: str
    target: str
    components: tuple[str, ...]


@dataclass(frozen=True)
class AtlasDocument:
    """Validated but unparsed atlas description."""

    name: str
    n: int
    m: int
    truncation_order: int
    charts: tuple[ChartSpec, ...]
    overlaps: tuple[OverlapSpec, ...]
    triples: tuple[tuple[str, str, str], ...] = ()
    metadata: Mapping[str, int] = field(default_factory=dict)

    def chart(self, chart_id: str) -> ChartSpec:
        for c in self.charts:
            if c.id == chart_id:
                return c
        raise SchemaError(f"unknown chart {chart_id!r}")

    @classmethod
    def from_mapping(cls, obj: Any) -> "AtlasDocument":
        if not isinstance(obj, dict):
            raise SchemaError("atlas document must be an object")
        for key in ("name", "n", "m", "truncation_order", "charts", "overlaps"):
            if key not in obj:
                raise SchemaError(f"missing field {key!r}", field=key)
        allowed = {"name", "n", "m", "truncation_order", "charts", "overlaps", "triples", "metadata"}
        extra = set(obj) - allowed
        if extra:
            raise SchemaError(f"unknown fields {sorted(extra)}")
        name = obj["name"]
        if not isinstance(name, str):
            raise SchemaError("'name' must be a string")
        n, m, K = (_int_field(obj, k) for k in ("n", "m", "truncation_order"))
        if not 1 <= m <= n:
            raise SchemaError(f"need 1 <= m <= n, got n={n}, m={m}")
        if K < 1:
            raise SchemaError("'truncation_order' must be at least 1")
        charts_raw = obj["charts"]
        if not isinstance(charts_raw, list) or not charts_raw:
            raise SchemaError("'charts' must be a nonempty list", field="charts")
        charts = []
        seen = set()
        for i, c in enumerate(charts_raw):
            if not isinstance(c, dict) or set(c) != {"id", "normal", "tangential"}:
                raise SchemaError(f"chart {i} must have exactly 'id', 'normal', 'tangential'", index=i)
            cid = c["id"]
            if not isinstance(cid, str) or not cid:
                raise SchemaError(f"chart {i}: id must be a nonempty string", index=i)
            if cid in seen:
                raise SchemaError(f"duplicate chart id {cid!r}", chart=cid)
            seen.add(cid)
            normal, tang = c["normal"], c["tangential"]
            for label, names in (("normal", normal), ("tangential", tang)):
                if not isinstance(names, list) or not all(
                    isinstance(x, str) and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", x) for x in names
                ):
                    raise SchemaError(f"chart {cid!r}: {label} must be a list of identifiers", chart=cid)
            if len(normal) != m or len(tang) != n - m:
                raise SchemaError(
                    f"chart {cid!r} must declare {m} normal and {n - m} tangential names", chart=cid
                )
            if len(set(normal + tang)) != n:
                raise SchemaError(f"chart {cid!r}: variable names must be distinct", chart=cid)
            charts.append(ChartSpec(cid, tuple(normal), tuple(tang)))
        overlaps_raw = obj["overlaps"]
        if not isinstance(overlaps_raw, list):
            raise SchemaError("'overlaps' must be a list", field="overlaps")
        overlaps = []
        pairs = set()
        for i, o in enumerate(overlaps_raw):
            if not isinstance(o, dict) or set(o) != {"from", "to", "components"}:
                raise SchemaError(f"overlap {i} must have exactly 'from', 'to', 'components'", index=i)
            src, dst, comps = o["from"], o["to"], o["components"]
            if src not in seen or dst not in seen:
                raise SchemaError(f"overlap {i} references an undeclared chart", index=i)
            if src == dst:
                raise SchemaError(f"overlap {i} maps chart {src!r} to itself", index=i)
            if (src, dst) in pairs:
                raise SchemaError(f"duplicate overlap {src}->{dst}", index=i)
            pairs.add((src, dst))
            if not isinstance(comps, list) or len(comps) != n or not all(isinstance(x, str) for x in comps):
                raise SchemaError(f"overlap {i}: 'components' must be {n} expression strings", index=i)
            overlaps.append(OverlapSpec(src, dst, tuple(comps)))
        triples = []
        for tr in obj.get("triples", []) or []:
            if not isinstance(tr, list) or len(tr) != 3 or not all(x in seen for x in tr):
                raise SchemaError(f"bad triple {tr!r}")
            triples.append(tuple(tr))
        meta = obj.get("metadata", {}) or {}
        if not isinstance(meta, dict) or set(meta) - {"genus", "self_intersection"}:
            raise SchemaError("'metadata' may only hold 'genus' and 'self_intersection'")
        for k, v in meta.items():
            if not isinstance(v, int) or isinstance(v, bool):
                raise SchemaError(f"metadata {k!r} must be an integer")
        if meta.get("genus", 0) < 0:
            raise SchemaError("genus must be nonnegative")
        return cls(name, n, m, K, tuple(charts), tuple(overlaps), tuple(triples), dict(meta))

    def to_mapping(self) -> dict:
        out = {
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "truncation_order": self.truncation_order,
            "charts": [
                {"id": c.id, "normal": list(c.normal), "tangential": list(c.tangential)} for c in self.charts
            ],
            "overlaps": [
                {"from": o.source, "to": o.target, "components": list(o.components)} for o in self.overlaps
            ],
        }
        if self.triples:
            out["triples"] = [list(t) for t in self.triples]
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out

    def build(self) -> Atlas:
        charts = {c.id: Chart(c.id, c.normal, c.tangential) for c in self.charts}
        transitions = []
        for i, o in enumerate(self.overlaps):
            ring = charts[o.source].ring(self.truncation_order)
            comps = []
            for j, text in enumerate(o.components):
                try:
                    comps.append(parse_in_ring(text, ring))
                except InputError as exc:
                    exc.message = f"overlap {i} ({o.source}->{o.target}), component {j}: {exc.message}"
                    exc.args = (exc.message,)
                    exc.payload.update(overlap=i, component=j)
                    raise
            transitions.append(ChartTransition(charts[o.source], charts[o.target], tuple(comps)))
        return Atlas(
            charts.values(),
            transitions,
            self.truncation_order,
            self.triples,
            self.name,
            self.metadata.get("genus"),
            self.metadata.get("self_intersection"),
        )


def _int_field(obj, key):
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{key!r} must be an integer", field=key)
    return v


def _read_source(source) -> Any:
    if isinstance(source, (dict, list)):
        return source
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, (str, os.PathLike)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc}") from exc
    else:
        raise SchemaError(f"cannot load a document from {type(source).__name__}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc


def load_atlas(source) -> Atlas:
    """Load and validate an atlas.

    Parameters
    ----------
    source : path, bytes or dict
        A file path, the raw JSON bytes, or an already decoded mapping.
    """
    return AtlasDocument.from_mapping(_read_source(source)).build()


def atlas_to_document(a: Atlas) -> AtlasDocument:
    """Document holding every directed transition, printed canonically."""
    charts = tuple(ChartSpec(c.id, c.normal, c.tangential) for c in a.charts)
    overlaps = tuple(
        OverlapSpec(src, dst, tuple(c.to_text() for c in t.components))
        for (src, dst), t in a.transitions.items()
    )
    return AtlasDocument(a.name, a.n, a.m, a.order, charts, overlaps, a.triples, a.metadata)


def dump_atlas(a: Atlas) -> str:
    """Deterministic JSON text for ``a``."""
    return json.dumps(atlas_to_document(a).to_mapping(), indent=2, sort_keys=True) + "\n"


def save_atlas(a: Atlas, path) -> None:
    Path(path).write_text(dump_atlas(a), encoding="utf-8")
