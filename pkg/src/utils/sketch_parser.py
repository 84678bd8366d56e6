"""
Reader and printer for the sketch description language.

    # comments run to the end of the line
    object a;
    object t;
    edge f: a -> t;
    relation g.f = h;                    # paths read right to left
    cone term at t over {};
    cone prod at p over { i => a, j => b } legs { i: p1, j: p2 };
    cone eq at e over { i => a, j => b, u: i -> j => f } legs { i: m, j: f.m };

Names are bare (letters, digits, ``_`` and ``'``) or double-quoted.
Trivial cones are never written; the sketch builder inserts them.
"""

import logging
import re
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from models.bounds import Bounds
from models.graph import Path
from models.presentation import Presentation
from models.sketch import Cone, LimitSketch, trivial_cone_id
from utils.errors import (ConeValidationError, DuplicateIdError, PathTypingError,
                          SketchSemanticError, SketchSyntaxError)
from utils.paths import build_presentation, identity_edge_id
from utils.sketch_service import index_category, make_cone, make_sketch

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<maps>=>)
  | (?P<quoted>"(?:[^"\\\n]|\\.)*")
  | (?P<name>[A-Za-z0-9_'][A-Za-z0-9_']*)
  | (?P<punct>[;:,.={}()])
""", re.VERBOSE)

_BARE = re.compile(r"[A-Za-z0-9_'][A-Za-z0-9_']*\Z")
_STATEMENTS = ["object", "edge", "relation", "cone"]


class Token(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str
    text: str
    line: int
    column: int


class SketchDocument(BaseModel):
    """A parsed sketch with its source text and the names bound while reading it."""
    model_config = ConfigDict(frozen=True)

    source: str
    sketch: LimitSketch
    bindings: Dict[str, Dict[str, str]]

    def render(self) -> str:
        return print_sketch(self.sketch)


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise SketchSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        chunk = match.group()
        if kind == "quoted":
            tokens.append(Token(kind="name", text=re.sub(r"\\(.)", r"\1", chunk[1:-1]),
                                line=line, column=pos - line_start + 1))
        elif kind == "punct":
            tokens.append(Token(kind=chunk, text=chunk, line=line, column=pos - line_start + 1))
        elif kind in ("arrow", "maps", "name"):
            tokens.append(Token(kind=chunk if kind != "name" else "name", text=chunk,
                                line=line, column=pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = match.end()
    tokens.append(Token(kind="eof", text="", line=line, column=pos - line_start + 1))
    return tokens


class _PathSyntax(BaseModel):
    """A path as written: ``id(x)`` or edge names right to left."""
    identity_of: Optional[str] = None
    names: Tuple[str, ...] = ()
    token: Token


class _ConeSyntax(BaseModel):
    name: str
    apex: str
    index_objects: List[Tuple[str, str, Token]] = []
    arrows: List[Tuple[str, str, str, _PathSyntax, Token]] = []
    legs: Dict[str, _PathSyntax] = {}
    token: Token


class SketchParser:
    """Recursive-descent reader producing a LimitSketch."""

    def __init__(self, text: str, bounds: Optional[Bounds] = None):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.bounds = bounds or Bounds()
        self.objects: List[str] = []
        self.edges: Dict[str, Tuple[str, str]] = {}
        self.relations: List[Tuple[_PathSyntax, _PathSyntax]] = []
        self.cones: List[_ConeSyntax] = []

    # Token stream

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def fail(self, expected: List[str]) -> None:
        token = self.current
        found = "end of input" if token.kind == "eof" else repr(token.text)
        raise SketchSyntaxError(f"unexpected {found}", token.line, token.column, expected)

    def expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            self.fail([kind])
        return self.advance()

    def expect_word(self, word: str) -> Token:
        if self.current.kind != "name" or self.current.text != word:
            self.fail([word])
        return self.advance()

    def name(self) -> Token:
        return self.expect("name")

    def semantic(self, token: Token, message: str, rule: str) -> None:
        raise SketchSemanticError(message, token.line, token.column, rule)

    # Grammar

    def parse(self) -> SketchDocument:
        while self.current.kind != "eof":
            token = self.current
            if token.kind != "name" or token.text not in _STATEMENTS:
                self.fail(_STATEMENTS)
            getattr(self, f"_{token.text}")()
        sketch = self._build()
        bindings = {
            "objects": {x: x for x in self.objects},
            "edges": {e: e for e in self.edges},
            "cones": {c.name: c.name for c in self.cones},
        }
        return SketchDocument(source=self.text, sketch=sketch, bindings=bindings)

    def _object(self) -> None:
        self.advance()
        token = self.name()
        if token.text in self.objects:
            self.semantic(token, f"object {token.text} is declared twice", "duplicate")
        self.objects.append(token.text)
        self.expect(";")

    def _edge(self) -> None:
        self.advance()
        token = self.name()
        self.expect(":")
        src = self.name()
        self.expect("->")
        tgt = self.name()
        self.expect(";")
        if token.text in self.edges or token.text in {identity_edge_id(x) for x in self.objects}:
            self.semantic(token, f"edge {token.text} is declared twice", "duplicate")
        for end in (src, tgt):
            self._require_object(end)
        self.edges[token.text] = (src.text, tgt.text)

    def _relation(self) -> None:
        self.advance()
        lhs = self._path()
        self.expect("=")
        rhs = self._path()
        self.expect(";")
        self.relations.append((lhs, rhs))

    def _cone(self) -> None:
        start = self.advance()
        token = self.name()
        self.expect_word("at")
        apex = self.name()
        self.expect_word("over")
        cone = _ConeSyntax(name=token.text, apex=apex.text, token=token)
        self.expect("{")
        while self.current.kind != "}":
            self._index_item(cone)
            if self.current.kind != ",":
                break
            self.advance()
        self.expect("}")
        if self.current.kind == "name" and self.current.text == "legs":
            self.advance()
            self.expect("{")
            while self.current.kind != "}":
                i = self.name()
                self.expect(":")
                if i.text in cone.legs:
                    self.semantic(i, f"leg {i.text} is given twice", "duplicate")
                cone.legs[i.text] = self._path()
                if self.current.kind != ",":
                    break
                self.advance()
            self.expect("}")
        self.expect(";")
        if any(c.name == cone.name for c in self.cones):
            self.semantic(token, f"cone {cone.name} is declared twice", "duplicate")
        self._require_object(apex)
        logging.debug(f"Read cone {cone.name} at line {start.line}")
        self.cones.append(cone)

    def _index_item(self, cone: _ConeSyntax) -> None:
        first = self.name()
        if self.current.kind == "=>":
            self.advance()
            obj = self.name()
            if any(i == first.text for i, _, _ in cone.index_objects):
                self.semantic(first, f"index object {first.text} is declared twice", "duplicate")
            self._require_object(obj)
            cone.index_objects.append((first.text, obj.text, first))
            return
        if self.current.kind != ":":
            self.fail(["=>", ":"])
        self.advance()
        s = self.name()
        self.expect("->")
        t = self.name()
        self.expect("=>")
        image = self._path()
        if any(a == first.text for a, _, _, _, _ in cone.arrows):
            self.semantic(first, f"index arrow {first.text} is declared twice", "duplicate")
        cone.arrows.append((first.text, s.text, t.text, image, first))

    def _path(self) -> _PathSyntax:
        token = self.current
        first = self.name()
        if first.text == "id" and self.current.kind == "(":
            self.advance()
            obj = self.name()
            self.expect(")")
            return _PathSyntax(identity_of=obj.text, token=token)
        names = [first.text]
        while self.current.kind == ".":
            self.advance()
            names.append(self.name().text)
        return _PathSyntax(names=tuple(names), token=token)

    def _require_object(self, token: Token) -> None:
        if token.text not in self.objects:
            self.semantic(token, f"unknown object {token.text}", "unknown-object")

    # Semantics

    def _resolve(self, path: _PathSyntax) -> Path:
        if path.identity_of is not None:
            if path.identity_of not in self.objects:
                self.semantic(path.token, f"unknown object {path.identity_of}", "unknown-object")
            return Path.identity(path.identity_of)
        edges = list(reversed(path.names))
        for e in edges:
            if e not in self.edges:
                self.semantic(path.token, f"unknown edge {e}", "unknown-edge")
        for before, after in zip(edges, edges[1:]):
            if self.edges[before][1] != self.edges[after][0]:
                self.semantic(path.token, f"{after} cannot follow {before}", "non-composable")
        return Path(start=self.edges[edges[0]][0], end=self.edges[edges[-1]][1], edges=tuple(edges))

    def _build(self) -> LimitSketch:
        pairs = []
        for lhs, rhs in self.relations:
            u, v = self._resolve(lhs), self._resolve(rhs)
            if u.start != v.start or u.end != v.end:
                self.semantic(lhs.token, f"relation {_path_text(u)} = {_path_text(v)} is not parallel", "non-parallel")
            pairs.append((u, v))
        try:
            presentation = build_presentation(self.objects, self.edges, pairs)
        except (DuplicateIdError, PathTypingError) as e:
            self.semantic(self.tokens[0], str(e), "duplicate")
        try:
            cones = [self._build_cone(presentation, c) for c in self.cones]
            return make_sketch(presentation, cones, self.bounds)
        except DuplicateIdError as e:
            self.semantic(self.cones[-1].token, str(e), "duplicate")
        except ConeValidationError as e:
            token = next((c.token for c in self.cones if c.name in str(e)), self.cones[-1].token)
            self.semantic(token, str(e), "cone-naturality")

    def _build_cone(self, p: Presentation, c: _ConeSyntax) -> Cone:
        index_names = [i for i, _, _ in c.index_objects]
        on_objects = {i: x for i, x, _ in c.index_objects}
        arrows = {}
        images = {}
        for name, s, t, image, token in c.arrows:
            for end in (s, t):
                if end not in on_objects:
                    self.semantic(token, f"unknown index object {end}", "unknown-object")
            path = self._resolve(image)
            if path.start != on_objects[s] or path.end != on_objects[t]:
                self.semantic(image.token, f"image of {name} must go from {on_objects[s]} to {on_objects[t]}",
                              "non-parallel")
            arrows[name] = (s, t)
            images[name] = path
        legs = {}
        for i, leg in c.legs.items():
            if i not in on_objects:
                self.semantic(leg.token, f"unknown index object {i}", "unknown-object")
            path = self._resolve(leg)
            if path.start != c.apex or path.end != on_objects[i]:
                self.semantic(leg.token, f"leg {i} must go from {c.apex} to {on_objects[i]}", "non-parallel")
            legs[i] = path
        for i, _, token in c.index_objects:
            if i not in legs:
                self.semantic(token, f"cone {c.name} has no leg at {i}", "cone-naturality")
        try:
            index = index_category(index_names, arrows)
        except ConeValidationError as e:
            self.semantic(c.token, str(e), "infinite-index")
        return make_cone(p, c.name, c.apex, index, on_objects, images, legs)


def parse_sketch(text: str, bounds: Optional[Bounds] = None) -> SketchDocument:
    """
    Parse sketch source text.

    Raises:
        SketchSyntaxError with the position and the expected tokens
        SketchSemanticError naming the violated rule
    """
    document = SketchParser(text, bounds).parse()
    logging.info(f"Parsed sketch: {len(document.sketch.base.objects)} objects, "
                 f"{len(document.sketch.base.edges)} edges, {len(document.sketch.user_cones)} cones")
    return document


def _quote(name: str) -> str:
    if _BARE.match(name) and name not in _STATEMENTS:
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _path_text(path: Path) -> str:
    if path.is_identity:
        return f"id({_quote(path.start)})"
    return ".".join(_quote(e) for e in reversed(path.edges))


def _cone_text(cone: Cone) -> str:
    items = [f"{_quote(i)} => {_quote(cone.on_objects[i])}" for i in cone.index_objects]
    for arrow in cone.generating_arrows:
        m = cone.index.generator_images[arrow]
        items.append(f"{_quote(arrow)}: {_quote(cone.arrow_src(m))} -> {_quote(cone.arrow_tgt(m))}"
                     f" => {_path_text(cone.diagram[m])}")
    text = f"cone {_quote(cone.name)} at {_quote(cone.apex)} over {{{', '.join(items)}}}"
    if cone.index_objects:
        legs = ", ".join(f"{_quote(i)}: {_path_text(cone.legs[i])}" for i in cone.index_objects)
        text += f" legs {{{legs}}}"
    return text + ";"


def print_sketch(s: LimitSketch) -> str:
    """Source text that parses back to the same sketch."""
    p = s.base
    lines = [f"object {_quote(x)};" for x in p.objects]
    lines += [f"edge {_quote(e)}: {_quote(p.src(e))} -> {_quote(p.tgt(e))};" for e in p.edges]
    lines += [f"relation {_path_text(rel.lhs)} = {_path_text(rel.rhs)};" for rel in p.relations]
    lines += [_cone_text(cone) for cone in s.cones if cone.name != trivial_cone_id(cone.apex)]
    return "\n".join(lines) + "\n"
