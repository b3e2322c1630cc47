"""Parser and serializer for the region description language.

Grammar (whitespace-separated, UTF-8)::

    region     := "region" "{" "T" "=" NUMBER expr "}"
    expr       := "cylinder"   "{" "t" "=" ival "x" "=" ival ("," ival)* "}"
                | "product"    "{" "t" "=" "{" ival ("," ival)* "}"
                                  "x" "=" "{" ival ("," ival)* "}" "}"
                | "polygon"    "{" point point point+ "}"
                | "charband"   "{" ("xi" | "eta") "=" ival ("," ival)* "}"
                | "raster"     "{" "file" "=" STRING "}"
                | "union"      "{" expr+ "}"
                | "intersect"  "{" expr+ "}"
                | "diff"       "{" expr expr+ "}"      # first minus the rest
                | "complement" "{" expr "}"
    ival       := "[" NUMBER "," NUMBER "]"
    point      := "(" NUMBER "," NUMBER ")"            # (t, x)

x-coordinates are reduced mod 2*pi (wrapping arcs split at the seam);
t-coordinates must lie within [0, T].  Unknown keywords are rejected.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .grid import TWO_PI
from .io import read_pgm
from .regions import (
    CharBand,
    Complement,
    Cylinder,
    Difference,
    Intersection,
    Polygon,
    Product,
    RasterLiteral,
    SpacetimeRegion,
    Union,
    normalize_arcs,
)


class DslError(ValueError):
    """Base for region-language failures."""


class DslSyntaxError(DslError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class DslSemanticError(DslError):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str  # 'ident', 'number', 'string', or a punctuation char
    value: str
    line: int
    col: int


_PUNCT = "{}[](),="


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise DslSyntaxError("unterminated string", line, start_col)
            tokens.append(_Token("string", text[i + 1 : j], line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        if ch.isdigit() or ch in "+-.":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] in "+-.eE"):
                j += 1
            raw = text[i:j]
            try:
                float(raw)
            except ValueError:
                raise DslSyntaxError(f"bad number {raw!r}", line, start_col) from None
            tokens.append(_Token("number", raw, line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", line, start_col)
    return tokens


class _Parser:
    def __init__(self, tokens: List[_Token], base_dir: str):
        self.tokens = tokens
        self.pos = 0
        self.base_dir = base_dir
        self.horizon: Optional[float] = None

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self, kind: Optional[str] = None, value: Optional[str] = None) -> _Token:
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise DslSyntaxError("unexpected end of input", last.line, last.col)
        if kind is not None and tok.kind != kind:
            raise DslSyntaxError(
                f"expected {value or kind}, got {tok.value!r}", tok.line, tok.col
            )
        if value is not None and tok.value != value:
            raise DslSyntaxError(
                f"expected {value!r}, got {tok.value!r}", tok.line, tok.col
            )
        self.pos += 1
        return tok

    def _number(self) -> float:
        return float(self._next("number").value)

    def _interval(self) -> Tuple[float, float]:
        self._next("[")
        a = self._number()
        self._next(",")
        b = self._number()
        self._next("]")
        return a, b

    def _interval_list(self) -> List[Tuple[float, float]]:
        out = [self._interval()]
        while self._peek() and self._peek().kind == ",":
            self._next(",")
            out.append(self._interval())
        return out

    def _t_interval(self, a: float, b: float) -> Tuple[float, float]:
        assert self.horizon is not None
        if b <= a:
            raise DslSemanticError(f"time interval [{a}, {b}] has non-positive length")
        if a < -1e-9 or b > self.horizon + 1e-9:
            raise DslSemanticError(
                f"time interval [{a}, {b}] leaves [0, T] with T={self.horizon}"
            )
        return max(a, 0.0), min(b, self.horizon)

    def parse_region(self) -> SpacetimeRegion:
        self._next("ident", "region")
        self._next("{")
        key = self._next("ident")
        if key.value != "T":
            raise DslSyntaxError(f"expected 'T', got {key.value!r}", key.line, key.col)
        self._next("=")
        horizon = self._number()
        if not horizon > 0.0:
            raise DslSemanticError("T must be positive")
        self.horizon = horizon
        root = self.parse_expr()
        self._next("}")
        tok = self._peek()
        if tok is not None:
            raise DslSyntaxError("trailing input after region", tok.line, tok.col)
        return SpacetimeRegion(horizon, root)

    def parse_expr(self):
        tok = self._next("ident")
        name = tok.value
        handlers = {
            "cylinder": self._cylinder,
            "product": self._product,
            "polygon": self._polygon,
            "charband": self._charband,
            "raster": self._raster,
            "union": lambda: Union(self._children(min_children=1)),
            "intersect": lambda: Intersection(self._children(min_children=1)),
            "diff": lambda: Difference(self._children(min_children=2)),
            "complement": lambda: Complement(self._children(min_children=1, max_children=1)[0]),
        }
        handler = handlers.get(name)
        if handler is None:
            raise DslSyntaxError(f"unknown region primitive {name!r}", tok.line, tok.col)
        return handler()

    def _children(self, min_children: int, max_children: Optional[int] = None):
        self._next("{")
        kids = []
        while self._peek() and self._peek().kind == "ident":
            kids.append(self.parse_expr())
        self._next("}")
        if len(kids) < min_children:
            raise DslSemanticError(f"operator needs at least {min_children} child regions")
        if max_children is not None and len(kids) > max_children:
            raise DslSemanticError(f"operator takes at most {max_children} child regions")
        return tuple(kids)

    def _key(self, expected: str) -> None:
        tok = self._next("ident")
        if tok.value != expected:
            raise DslSyntaxError(
                f"unknown key {tok.value!r} (expected {expected!r})", tok.line, tok.col
            )
        self._next("=")

    def _cylinder(self) -> Cylinder:
        self._next("{")
        self._key("t")
        t_lo, t_hi = self._t_interval(*self._interval())
        self._key("x")
        try:
            arcs = normalize_arcs(self._interval_list())
        except ValueError as exc:
            raise DslSemanticError(str(exc)) from None
        self._next("}")
        return Cylinder(t_lo, t_hi, arcs)

    def _product(self) -> Product:
        self._next("{")
        self._key("t")
        self._next("{")
        t_ivals = tuple(self._t_interval(*iv) for iv in self._interval_list())
        self._next("}")
        self._key("x")
        self._next("{")
        try:
            arcs = normalize_arcs(self._interval_list())
        except ValueError as exc:
            raise DslSemanticError(str(exc)) from None
        self._next("}")
        self._next("}")
        return Product(t_ivals, arcs)

    def _polygon(self) -> Polygon:
        self._next("{")
        points = []
        while self._peek() and self._peek().kind == "(":
            self._next("(")
            t = self._number()
            self._next(",")
            x = self._number()
            self._next(")")
            assert self.horizon is not None
            if t < -1e-9 or t > self.horizon + 1e-9:
                raise DslSemanticError(f"polygon vertex t={t} leaves [0, T]")
            points.append((min(max(t, 0.0), self.horizon), x % TWO_PI))
        self._next("}")
        if len(points) < 3:
            raise DslSemanticError("empty polygon: need at least 3 vertices")
        return Polygon(tuple(points))

    def _charband(self) -> CharBand:
        self._next("{")
        tok = self._next("ident")
        if tok.value not in ("xi", "eta"):
            raise DslSyntaxError(
                f"charband coordinate must be 'xi' or 'eta', got {tok.value!r}",
                tok.line,
                tok.col,
            )
        self._next("=")
        try:
            arcs = normalize_arcs(self._interval_list())
        except ValueError as exc:
            raise DslSemanticError(str(exc)) from None
        self._next("}")
        return CharBand(tok.value, arcs)

    def _raster(self) -> RasterLiteral:
        self._next("{")
        self._key("file")
        path = self._next("string").value
        self._next("}")
        full = path if os.path.isabs(path) else os.path.join(self.base_dir, path)
        try:
            grid = read_pgm(full)
        except OSError as exc:
            raise DslSemanticError(f"cannot read raster file {path!r}: {exc}") from None
        assert self.horizon is not None
        return RasterLiteral(grid, self.horizon, path)


def parse_region(text: str, base_dir: str = ".") -> SpacetimeRegion:
    """Parse DSL source; raises DslSyntaxError / DslSemanticError."""
    tokens = _tokenize(text)
    if not tokens:
        raise DslSyntaxError("empty input", 1, 1)
    return _Parser(tokens, base_dir).parse_region()


def parse_region_file(path: str) -> SpacetimeRegion:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_region(text, base_dir=os.path.dirname(os.path.abspath(path)))


# --------------------------------------------------------------------------
# Serializer (canonical, whitespace-normalized)
# --------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _fmt_ivals(ivals) -> str:
    return ",".join(f"[{_fmt(a)},{_fmt(b)}]" for a, b in ivals)


def serialize_expr(node) -> str:
    if isinstance(node, Cylinder):
        return f"cylinder{{ t=[{_fmt(node.t_lo)},{_fmt(node.t_hi)}] x={_fmt_ivals(node.arcs)} }}"
    if isinstance(node, Product):
        return (
            f"product{{ t={{{_fmt_ivals(node.t_intervals)}}}"
            f" x={{{_fmt_ivals(node.x_arcs)}}} }}"
        )
    if isinstance(node, Polygon):
        pts = " ".join(f"({_fmt(t)},{_fmt(x)})" for t, x in node.vertices)
        return f"polygon{{ {pts} }}"
    if isinstance(node, CharBand):
        return f"charband{{ {node.coord}={_fmt_ivals(node.arcs)} }}"
    if isinstance(node, RasterLiteral):
        path = node.path if node.path is not None else "<memory>"
        return f'raster{{ file="{path}" }}'
    if isinstance(node, Union):
        return "union{ " + " ".join(serialize_expr(c) for c in node.children) + " }"
    if isinstance(node, Intersection):
        return "intersect{ " + " ".join(serialize_expr(c) for c in node.children) + " }"
    if isinstance(node, Difference):
        return "diff{ " + " ".join(serialize_expr(c) for c in node.children) + " }"
    if isinstance(node, Complement):
        return "complement{ " + serialize_expr(node.child) + " }"
    raise TypeError(f"cannot serialize {type(node).__name__}")


def serialize_region(region: SpacetimeRegion) -> str:
    return f"region{{ T={_fmt(region.horizon)} {serialize_expr(region.root)} }}"
