"""Concrete syntax: terms, ``sfun`` programs and JSON ingestion.

The grammar is described in ``docs/grammar.md``.  Parsing happens in two
steps: a recursive-descent parser builds a raw tree without contexts, and
an elaborator pushes source contexts top-down (markers free in the whole
term, in order of first occurrence, unless a source is given).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import ArityError, CompileError, UncalSyntaxError, UncalTypeError
from .syntax import (
    DEFAULT,
    Compose,
    Cycle,
    Def,
    Edge,
    Emp,
    Man,
    MarkerRef,
    Nil,
    Pair,
    Term,
    anonymous,
    define,
    fresh,
    pair_target_names,
    rename_source,
    union,
    union_all,
)

KEYWORDS = {"cycle", "man", "sfun", "if", "then", "else", "let", "query"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<marker>&[A-Za-z0-9_.']*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_?'.]*)
  | (?P<op>:=|\+\+|[:@(){}\[\],!|=<>;]|∪|⊕)
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    value: object
    line: int
    col: int


def tokenize(text: str):
    out, pos, line, col = [], 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise UncalSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind != "ws":
            if kind == "string":
                value = json.loads(raw)
            elif kind == "int":
                value = int(raw)
            elif kind == "op":
                value = {"∪": "|", "⊕": "++"}.get(raw, raw)
            else:
                value = raw
            if kind == "ident" and raw in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, value, line, col))
        nl = raw.count("\n")
        if nl:
            line += nl
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    out.append(Token("eof", None, line, col))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def is_op(self, *ops, tok=None):
        tok = tok or self.tok
        return tok.kind == "op" and tok.value in ops

    def is_kw(self, kw):
        return self.tok.kind == "kw" and self.tok.value == kw

    def error(self, expected, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise UncalSyntaxError(f"unexpected {found}", tok.line, tok.col, expected)

    def advance(self):
        tok = self.tok
        self.i += 1
        return tok

    def expect_op(self, op):
        if not self.is_op(op):
            self.error(repr(op))
        return self.advance()

    def expect_kw(self, kw):
        if not self.is_kw(kw):
            self.error(repr(kw))
        return self.advance()

    def name(self, what="marker"):
        if self.tok.kind not in ("ident", "marker"):
            self.error(what)
        return self.advance().value

    # terms ------------------------------------------------------------

    def term(self):
        node = self.pairx()
        while self.is_op("@"):
            self.advance()
            node = ("comp", node, self.pairx())
        return node

    def pairx(self):
        items = [self.defx()]
        while self.is_op("++"):
            self.advance()
            items.append(self.defx())
        return items[0] if len(items) == 1 else ("pair", items)

    def defx(self):
        if self.tok.kind in ("ident", "marker") and self.is_op(":=", tok=self.peek()):
            name = self.advance().value
            self.advance()
            return ("def", name, self.unionx())
        return self.unionx()

    def unionx(self):
        node = self.edgex()
        while self.is_op("|"):
            self.advance()
            node = ("union", node, self.edgex())
        return node

    def label_ahead(self):
        return self.tok.kind in ("ident", "string", "int") and self.is_op(":", tok=self.peek())

    def edgex(self):
        if self.label_ahead():
            label = self.advance().value
            self.advance()
            return ("edge", label, self.edgex())
        return self.atom()

    def annotation(self):
        if not self.is_op("<"):
            return None
        self.advance()
        names = []
        while not self.is_op(">"):
            names.append(self.name())
            if self.is_op(","):
                self.advance()
            elif not self.is_op(">"):
                self.error("',' or '>'")
        self.advance()
        return tuple(names)

    def atom(self):
        tok = self.tok
        if self.is_op("("):
            self.advance()
            if self.is_op(")"):
                self.advance()
                return ("nil", self.annotation())
            node = self.term()
            self.expect_op(")")
            return node
        if self.is_op("{"):
            self.advance()
            if self.is_op("}"):
                self.advance()
                return ("nil", self.annotation())
            items = [self.term()]
            while self.is_op(","):
                self.advance()
                items.append(self.term())
            self.expect_op("}")
            node = items[0]
            for it in items[1:]:
                node = ("union", node, it)
            return node
        if self.is_op("!"):
            self.advance()
            return ("emp", self.annotation())
        if tok.kind == "kw" and tok.value == "man":
            self.advance()
            return ("man", self.annotation())
        if tok.kind == "kw" and tok.value == "cycle":
            self.advance()
            bound = None
            if self.is_op("["):
                self.advance()
                bound = []
                while not self.is_op("]"):
                    bound.append(self.name())
                    if self.is_op(","):
                        self.advance()
                self.advance()
                bound = tuple(bound)
            self.expect_op("(")
            body = self.term()
            self.expect_op(")")
            return ("cycle", bound, body)
        if tok.kind in ("string", "int"):
            self.advance()
            return ("edge", tok.value, ("nil", None))
        if tok.kind in ("ident", "marker"):
            self.advance()
            return ("mark", tok.value, self.annotation())
        self.error("a term")


# -- elaboration ---------------------------------------------------------------


def _raw_tgt(node):
    kind = node[0]
    if kind in ("mark", "edge", "nil", "man", "union"):
        return (DEFAULT,)
    if kind == "emp":
        return ()
    if kind == "def":
        return (DEFAULT,) if node[1] == DEFAULT else (node[1],)
    if kind == "comp":
        return _raw_tgt(node[1])
    if kind == "pair":
        return pair_target_names([_raw_tgt(it) for it in node[1]], [it[0] == "def" and it[1] != DEFAULT for it in node[1]])
    if kind == "cycle":
        return node[1] if node[1] is not None else _raw_tgt(node[2])
    raise AssertionError(kind)


def _raw_free(node, out):
    kind = node[0]
    if kind == "mark":
        if node[1] not in out:
            out.append(node[1])
    elif kind in ("edge", "def"):
        _raw_free(node[2], out)
    elif kind == "comp":
        _raw_free(node[2], out)
    elif kind == "union":
        _raw_free(node[1], out)
        _raw_free(node[2], out)
    elif kind == "pair":
        for it in node[1]:
            _raw_free(it, out)
    elif kind == "cycle":
        inner = []
        _raw_free(node[2], inner)
        bound = set(_raw_tgt(node))
        for x in inner:
            if x not in bound and x not in out:
                out.append(x)
    return out


def _check_ann(ann, ctx, what):
    if ann is not None and tuple(ann) != tuple(ctx):
        raise UncalTypeError(what, f"annotated source <{','.join(ann)}> but context is <{','.join(ctx)}>")


def _elab(node, src):
    kind = node[0]
    if kind == "mark":
        _check_ann(node[2], src, "Mark")
        return MarkerRef(node[1], src)
    if kind == "nil":
        _check_ann(node[1], src, "Nil")
        return Nil(src)
    if kind == "emp":
        _check_ann(node[1], src, "Emp")
        return Emp(src)
    if kind == "man":
        _check_ann(node[1], src, "Man")
        return Man(src)
    if kind == "edge":
        return Edge(node[1], _elab(node[2], src))
    if kind == "def":
        return define(node[1], _elab(node[2], src))
    if kind == "union":
        return union(_elab(node[1], src), _elab(node[2], src))
    if kind == "pair":
        return Pair(tuple(_elab(it, src) for it in node[1]))
    if kind == "comp":
        right = _elab(node[2], src)
        return Compose(_elab(node[1], right.tgt), right)
    if kind == "cycle":
        bound = _raw_tgt(node)
        outer = []
        for y in src:
            outer.append(fresh(y, set(bound) | set(outer)) if y in bound else y)
        cyc = Cycle(bound, _elab(node[2], tuple(outer) + bound))
        return cyc if tuple(outer) == tuple(src) else rename_source(cyc, src)
    raise AssertionError(kind)


def parse_term(text: str, src=None) -> Term:
    """Parse and elaborate one term; ``src`` fixes the source context."""
    p = _Parser(text)
    raw = p.term()
    if p.tok.kind != "eof":
        p.error("end of input")
    if src is None:
        src = _raw_free(raw, [])
    return _elab(raw, tuple(src))


# -- printing ------------------------------------------------------------------

_BARE = re.compile(r"^[A-Za-z_][A-Za-z0-9_?'.]*$")


def format_label(label) -> str:
    if isinstance(label, int):
        return str(label)
    if _BARE.match(label) and label not in KEYWORDS:
        return label
    return json.dumps(label)


def _is_union(t):
    return (
        isinstance(t, Compose)
        and isinstance(t.left, Man)
        and isinstance(t.right, Pair)
        and len(t.right.items) == 2
        and all(len(it.tgt) == 1 for it in t.right.items)
    )


def rebind(t: Term) -> Term:
    """Make interface names agree so that printing is faithful.

    Composition is positional; this renames the leaves of every left factor
    to the roots of its right factor and cycle binders to the names their
    body declares.
    """
    if isinstance(t, Compose):
        right = rebind(t.right)
        if _is_union(t):
            return Compose(Man(right.tgt), right) if isinstance(right, Pair) else union(*right.items)
        left = rebind(t.left)
        if left.src != right.tgt:
            left = rebind(rename_source(left, right.tgt))
        return Compose(left, right)
    if isinstance(t, Edge):
        return Edge(t.label, rebind(t.body))
    if isinstance(t, Def):
        return Def(t.name, rebind(t.body))
    if isinstance(t, Pair):
        items = tuple(rebind(it) for it in t.items)
        try:
            return Pair(items)
        except UncalTypeError:
            # a renamed cycle now clashes with a definition; drop the definitions
            return Pair(tuple(anonymous(it) for it in items))
    if isinstance(t, Cycle):
        body = rebind(t.body)
        want = _cycle_names(body, t.bound)
        if want != t.bound and not set(want) & set(t.src):
            y = body.src[: len(body.src) - len(t.bound)]
            body = rebind(rename_source(body, y + want))
            return Cycle(want, body)
        return Cycle(t.bound, body)
    return t


def _cycle_names(body, bound):
    # multi-marker cycles print their binders explicitly and keep them
    if len(bound) == 1:
        return (body.name,) if isinstance(body, Def) else (DEFAULT,)
    return bound


def _union_items(t):
    items = []
    while _is_union(t):
        a, b = t.right.items
        items.append(b)
        t = a
    items.append(t)
    return items[::-1]


def _leaf(text, t, annotate):
    if annotate:
        return text + "<" + ",".join(t.src) + ">"
    return text


def _p(t: Term, prec: int, ann: bool) -> str:
    # precedence: 0 compose, 1 pair, 2 def, 3 union, 4 edge, 5 atom
    if _is_union(t):
        return "{" + ", ".join(_p(it, 0, ann) for it in _union_items(t)) + "}"
    if isinstance(t, Compose):
        s = f"{_p(t.left, 0, ann)} @ {_p(t.right, 1, ann)}"
        return s if prec <= 0 else f"({s})"
    if isinstance(t, Pair):
        return "(" + " ++ ".join(_p(it, 2, ann) for it in t.items) + ")"
    if isinstance(t, Def):
        s = f"{t.name} := {_p(t.body, 3, ann)}"
        return s if prec <= 2 else f"({s})"
    if isinstance(t, Edge):
        s = f"{format_label(t.label)}:{_p(t.body, 4, ann)}"
        return s if prec <= 4 else f"({s})"
    if isinstance(t, Cycle):
        if len(t.bound) == 1:
            x = t.bound[0]
            if isinstance(t.body, Def) and t.body.name == x:
                return f"cycle({_p(t.body, 2, ann)})"
            if x == DEFAULT:
                return f"cycle(& := {_p(t.body, 3, ann)})"
        elif t.body.tgt == t.bound:
            return f"cycle({_p(t.body, 0, ann)})"
        return f"cycle[{','.join(t.bound)}]({_p(t.body, 0, ann)})"
    if isinstance(t, MarkerRef):
        return _leaf(t.name, t, ann)
    if isinstance(t, Nil):
        return _leaf("()", t, True) if ann else "{}"
    if isinstance(t, Emp):
        return _leaf("!", t, ann)
    if isinstance(t, Man):
        return _leaf("man", t, ann)
    raise TypeError(t)


def print_term(t: Term, annotate: bool = False) -> str:
    """Canonical text for ``t``; ``annotate`` adds source contexts to leaves."""
    return _p(rebind(t), 0, annotate)


# -- programs ------------------------------------------------------------------


@dataclass
class SfunDef:
    name: str
    label_var: str
    tail_var: str
    body: tuple
    line: int = 0

    def calls(self):
        out = []

        def walk(b):
            if b[0] == "call":
                if b[1] not in out:
                    out.append(b[1])
            elif b[0] == "edge":
                walk(b[2])
            elif b[0] == "union":
                for it in b[1]:
                    walk(it)
            elif b[0] == "if":
                walk(b[2])
                walk(b[3])

        walk(self.body)
        return out

    def uses_tail(self):
        def walk(b):
            if b[0] == "tail":
                return True
            if b[0] == "edge":
                return walk(b[2])
            if b[0] == "union":
                return any(walk(it) for it in b[1])
            if b[0] == "if":
                return walk(b[2]) or walk(b[3])
            return False

        return walk(self.body)


@dataclass
class Program:
    functions: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)
    bindings: dict = field(default_factory=dict)
    queries: list = field(default_factory=list)

    def block_of(self, name):
        for block in self.blocks:
            if any(f.name == name for f in block):
                return block
        raise KeyError(name)


class _ProgramParser(_Parser):
    def program(self):
        prog = Program()
        order = []
        while self.tok.kind != "eof":
            if self.is_kw("sfun"):
                f = self.sfun()
                if f.name in prog.functions:
                    raise UncalSyntaxError(f"function {f.name} defined twice", f.line, 0)
                prog.functions[f.name] = f
                order.append(f.name)
            elif self.is_kw("let"):
                self.advance()
                name = self.name("binding name")
                self.expect_op("=")
                prog.bindings[name] = self.term()
            elif self.is_kw("query"):
                tok = self.advance()
                fname = self.name("function name")
                self.expect_op("(")
                arg = self.term()
                self.expect_op(")")
                prog.queries.append((fname, arg, tok.line))
            elif self.is_op(";"):
                self.advance()
            else:
                self.error("'sfun', 'let' or 'query'")
        for f in prog.functions.values():
            for g in f.calls():
                if g not in prog.functions:
                    raise UncalSyntaxError(f"call to undefined function {g} in {f.name}", f.line, 0)
        for fname, _, line in prog.queries:
            if fname not in prog.functions:
                raise UncalSyntaxError(f"query calls undefined function {fname}", line, 0)
        prog.blocks = _group(order, prog.functions)
        return prog

    def sfun(self):
        tok = self.expect_kw("sfun")
        name = self.name("function name")
        self.expect_op("(")
        lvar = self.name("label variable")
        self.expect_op(":")
        tvar = self.name("tail variable")
        self.expect_op(")")
        self.expect_op("=")
        self.lvar, self.tvar = lvar, tvar
        body = self.body()
        return SfunDef(name, lvar, tvar, body, tok.line)

    def body(self):
        if self.is_kw("if"):
            self.advance()
            v = self.name("label variable")
            if v != self.lvar:
                self.error(f"label variable {self.lvar}", self.toks[self.i - 1])
            self.expect_op("=")
            if self.tok.kind not in ("ident", "string", "int"):
                self.error("a label literal")
            lit = self.advance().value
            self.expect_kw("then")
            then = self.body()
            self.expect_kw("else")
            return ("if", lit, then, self.body())
        return self.bunion()

    def bunion(self):
        items = [self.bedge()]
        while self.is_op("|"):
            self.advance()
            items.append(self.bedge())
        return items[0] if len(items) == 1 else ("union", items)

    def bedge(self):
        if self.label_ahead():
            tok = self.advance()
            self.advance()
            label = None if tok.kind == "ident" and tok.value == self.lvar else tok.value
            return ("edge", label, self.bedge())
        return self.batom()

    def batom(self):
        tok = self.tok
        if self.is_op("("):
            self.advance()
            if self.is_op(")"):
                self.advance()
                return ("nil",)
            b = self.body()
            self.expect_op(")")
            return b
        if self.is_op("{"):
            self.advance()
            if self.is_op("}"):
                self.advance()
                return ("nil",)
            items = [self.body()]
            while self.is_op(","):
                self.advance()
                items.append(self.body())
            self.expect_op("}")
            return items[0] if len(items) == 1 else ("union", items)
        if tok.kind in ("string", "int"):
            self.advance()
            return ("edge", tok.value, ("nil",))
        if tok.kind == "ident" and self.is_op("(", tok=self.peek()):
            self.advance()
            self.advance()
            args = []
            while not self.is_op(")"):
                if self.tok.kind == "eof":
                    self.error("')'")
                args.append(self.advance())
                if self.is_op(","):
                    self.advance()
            self.advance()
            if len(args) != 1:
                raise ArityError(f"{tok.value} takes one argument, got {len(args)} (line {tok.line})")
            if args[0].kind != "ident" or args[0].value != self.tvar:
                raise CompileError(
                    f"line {tok.line}: recursive calls must be applied to the tail {self.tvar}"
                )
            return ("call", tok.value)
        if tok.kind == "ident" and tok.value == self.tvar:
            self.advance()
            return ("tail",)
        if tok.kind in ("ident", "marker"):
            self.advance()
            return ("mark", tok.value)
        self.error("an sfun body")


def _group(order, functions):
    """Weakly connected components of the call graph, in declaration order."""
    parent = {f: f for f in order}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in order:
        for g in functions[f].calls():
            parent[find(f)] = find(g)
    groups = {}
    for f in order:
        groups.setdefault(find(f), []).append(functions[f])
    return list(groups.values())


def parse_program(text: str) -> Program:
    prog = _ProgramParser(text).program()
    prog.bindings = {k: _elab(v, tuple(_raw_free(v, []))) for k, v in prog.bindings.items()}
    queries = []
    for fname, raw, _ in prog.queries:
        if raw[0] == "mark" and raw[2] is None:
            # a bare name: a let binding, or the data file given at run time
            queries.append((fname, raw[1]))
        else:
            queries.append((fname, _elab(raw, tuple(_raw_free(raw, [])))))
    prog.queries = queries
    return prog


# -- ingestion -----------------------------------------------------------------


def _scalar_label(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _tree(v) -> Term:
    if isinstance(v, _Obj):
        return union_all([Edge(k, _tree(x)) for k, x in v])
    if isinstance(v, list):
        return union_all([_tree(x) for x in v])
    if v is None:
        return Nil(())
    return Edge(_scalar_label(v), Nil(()))


class _Obj(list):
    """Ordered key/value pairs; keeps repeated keys."""


def ingest_tree(text: str) -> Term:
    """Read a JSON document as a tree term of type ``<> -> <&>``."""
    try:
        doc = json.loads(text, object_pairs_hook=_Obj)
    except json.JSONDecodeError as exc:
        raise UncalSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return _tree(doc)
