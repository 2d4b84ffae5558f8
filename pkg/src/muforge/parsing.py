"""Concrete syntax: formulas (.mu), structures (.kst), trees (.twb), DOT.

Formula grammar::

    formula := disj
    disj    := conj ("|" conj)*
    conj    := unit ("&" unit)*
    unit    := "tt" | "ff" | PROP | "~" PROP | VAR
             | "->" "{" [formula ("," formula)*] "}"
             | ("mu" | "nu") VAR "." disj
             | "(" formula ")"

PROP is a lowercase identifier, VAR an uppercase one.  A fixpoint body
extends as far to the right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (And, Bottom, Formula, Modal, Mu, NegProp, Nu, Or, Prop,
                     Top, Var, BigOr)

KEYWORDS = {"mu", "nu", "tt", "ff"}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<punct>[(){},.&|~])
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "punct", "ident", "eof"
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(line, col))
        s = m.group(0)
        if m.lastgroup != "ws":
            kind = "ident" if m.lastgroup == "ident" else "punct"
            toks.append(_Tok(kind, s, SourceSpan(line, col, len(s))))
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(_Tok("eof", "", SourceSpan(line, col)))
    return toks


class _FormulaParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.taken = {t.text for t in self.toks if t.kind == "ident" and t.text[0].isupper()}
        self.bound: set[str] = set()

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def take(self, text=None) -> _Tok:
        tok = self.cur
        if text is not None and tok.text != text:
            want = text if text else "end of input"
            got = tok.text or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok.span)
        self.i += 1
        return tok

    def fresh(self, name: str) -> str:
        if name not in self.bound:
            self.bound.add(name)
            return name
        k = 1
        while f"{name}_{k}" in self.taken or f"{name}_{k}" in self.bound:
            k += 1
        new = f"{name}_{k}"
        self.bound.add(new)
        return new

    def parse(self) -> Formula:
        f = self.disj({})
        if self.cur.kind != "eof":
            raise ParseError(f"unexpected {self.cur.text!r}", self.cur.span)
        return f

    def disj(self, env):
        f = self.conj(env)
        while self.cur.text == "|":
            self.take()
            f = Or(f, self.conj(env))
        return f

    def conj(self, env):
        f = self.unit(env)
        while self.cur.text == "&":
            self.take()
            f = And(f, self.unit(env))
        return f

    def unit(self, env):
        tok = self.cur
        if tok.text == "(":
            self.take()
            f = self.disj(env)
            self.take(")")
            return f
        if tok.text == "->":
            self.take()
            self.take("{")
            members = []
            if self.cur.text != "}":
                members.append(self.disj(env))
                while self.cur.text == ",":
                    self.take()
                    members.append(self.disj(env))
            self.take("}")
            return Modal(members)
        if tok.text == "~":
            self.take()
            p = self.take()
            if p.kind != "ident" or not p.text[0].islower() or p.text in KEYWORDS:
                raise ParseError("negation applies to propositions only", p.span)
            return NegProp(p.text)
        if tok.kind != "ident":
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.span)
        self.take()
        if tok.text in ("mu", "nu"):
            v = self.take()
            if v.kind != "ident" or not v.text[0].isupper():
                raise ParseError(f"{tok.text} must bind an uppercase variable", v.span)
            self.take(".")
            name = self.fresh(v.text)
            inner = dict(env)
            inner[v.text] = name
            body = self.disj(inner)
            return Mu(name, body) if tok.text == "mu" else Nu(name, body)
        if tok.text == "tt":
            return Top()
        if tok.text == "ff":
            return Bottom()
        if tok.text[0].isupper():
            return Var(env.get(tok.text, tok.text))
        return Prop(tok.text)


def parse_formula(text: str) -> Formula:
    """Parse a formula, alpha-renaming binders so their names are distinct."""
    return _FormulaParser(text).parse()


def print_formula(f: Formula) -> str:
    return _print(f, 0, True)


def _print(f, prec, tail):
    # prec: 0 disjunction operand, 1 conjunction-left operand, 2 unit
    if isinstance(f, Top):
        return "tt"
    if isinstance(f, Bottom):
        return "ff"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, NegProp):
        return "~" + f.name
    if isinstance(f, Var):
        return f.name
    if isinstance(f, (Modal, BigOr)):
        inner = ", ".join(_print(m, 0, True) for m in f.members)
        if isinstance(f, BigOr):
            return "(" + (" | ".join(_print(m, 1, False) for m in f.members) or "ff") + ")"
        return "->{" + inner + "}"
    if isinstance(f, (Mu, Nu)):
        kw = "mu" if isinstance(f, Mu) else "nu"
        s = f"{kw} {f.var}. {_print(f.body, 0, True)}"
        return s if tail else "(" + s + ")"
    if isinstance(f, Or):
        if prec >= 1:
            return "(" + _print(f, 0, True) + ")"
        return _print(f.left, 0, False) + " | " + _print(f.right, 1, tail)
    if isinstance(f, And):
        if prec >= 2:
            return "(" + _print(f, 0, True) + ")"
        return _print(f.left, 1, False) + " & " + _print(f.right, 2, tail)
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------- structures

def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield no, raw, line.split()


def parse_structure(text: str):
    """Lines ``state <id> [<prop>...]``, ``init <id>``, ``edge <id> <id>``."""
    from .games import KripkeStructure

    props: dict = {}
    edges = []
    init = None
    for no, raw, words in _lines(text):
        span = SourceSpan(no, raw.index(words[0]) + 1, len(words[0]))
        head = words[0]
        if head == "state":
            if len(words) < 2:
                raise ParseError("state needs an id", span)
            if words[1] in props:
                raise ParseError(f"state {words[1]} declared twice", span)
            props[words[1]] = frozenset(words[2:])
        elif head == "init":
            if len(words) != 2:
                raise ParseError("init takes exactly one state id", span)
            if init is not None:
                raise ParseError("init given twice", span)
            init = (words[1], span)
        elif head == "edge":
            if len(words) != 3:
                raise ParseError("edge takes two state ids", span)
            edges.append((words[1], words[2], span))
        else:
            raise ParseError(f"unknown directive {head!r}", span)
    if init is None:
        raise ParseError("missing init line", SourceSpan(1, 1))
    if init[0] not in props:
        raise ParseError(f"unknown state {init[0]}", init[1])
    for a, b, span in edges:
        for s in (a, b):
            if s not in props:
                raise ParseError(f"unknown state {s}", span)
    return KripkeStructure(
        states=tuple(props), init=init[0],
        edges=frozenset((a, b) for a, b, _ in edges), props=props)


def print_structure(m) -> str:
    out = []
    for s in sorted(m.states):
        out.append(" ".join(["state", s] + sorted(m.props.get(s, ()))))
    out.append(f"init {m.init}")
    for a, b in sorted(m.edges):
        out.append(f"edge {a} {b}")
    return "\n".join(out) + "\n"


# -------------------------------------------------------------------- trees

def parse_twb(text: str):
    """Lines ``root <id>`` and ``node <id> kind=... [lits=] [prio=] [children=] [back=]``."""
    from .trees import KINDS, TreeError, TreeWithBackEdges, TwbNode

    nodes = {}
    root = None
    for no, raw, words in _lines(text):
        span = SourceSpan(no, raw.index(words[0]) + 1, len(words[0]))
        if words[0] == "root":
            if len(words) != 2 or not words[1].isdigit():
                raise ParseError("root takes one integer id", span)
            root = int(words[1])
            continue
        if words[0] != "node":
            raise ParseError(f"unknown directive {words[0]!r}", span)
        if len(words) < 2 or not words[1].isdigit():
            raise ParseError("node needs an integer id", span)
        nid = int(words[1])
        if nid in nodes:
            raise ParseError(f"node {nid} declared twice", span)
        attrs = {}
        for w in words[2:]:
            if "=" not in w:
                raise ParseError(f"expected key=value, found {w!r}", span)
            k, v = w.split("=", 1)
            attrs[k] = v
        unknown = set(attrs) - {"kind", "lits", "prio", "children", "back"}
        if unknown:
            raise ParseError(f"unknown attribute {sorted(unknown)[0]!r}", span)
        kind = attrs.get("kind")
        if kind not in KINDS:
            raise ParseError(f"kind must be one of {', '.join(KINDS)}", span)
        try:
            lits = frozenset(x for x in attrs.get("lits", "").split(",") if x)
            prio = int(attrs.get("prio", "0"))
            children = tuple(int(x) for x in attrs.get("children", "").split(",") if x)
            back = int(attrs["back"]) if "back" in attrs else None
        except ValueError as exc:
            raise ParseError(str(exc), span) from None
        nodes[nid] = TwbNode(kind=kind, lits=lits, prio=prio, children=children, back=back)
    if root is None:
        raise ParseError("missing root line", SourceSpan(1, 1))
    try:
        return TreeWithBackEdges(nodes, root)
    except TreeError as exc:
        raise ParseError(str(exc), SourceSpan(1, 1)) from None


def print_twb(t) -> str:
    out = [f"root {t.root}"]
    for n in sorted(t.nodes):
        node = t.nodes[n]
        kind = t.nodes[node.back].kind if node.is_stub else node.kind
        parts = ["node", str(n), f"kind={kind}"]
        if node.lits:
            parts.append("lits=" + ",".join(sorted(node.lits)))
        parts.append(f"prio={node.prio}")
        if node.children:
            parts.append("children=" + ",".join(str(c) for c in node.children))
        if node.is_stub:
            parts.append(f"back={node.back}")
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------- DOT

def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(obj) -> str:
    """DOT text for trees, label graphs, cores, arenas and structures."""
    from .games import Arena, KripkeStructure
    from .tableau import CoreGraph, LabelGraph
    from .trees import TreeWithBackEdges

    lines = []
    if isinstance(obj, TreeWithBackEdges):
        lines.append("digraph twb {")
        for n in obj.graph_nodes():
            node = obj.nodes[n]
            shape = {"modal": "box", "or": "diamond", "leaf": "ellipse"}[node.kind]
            lab = f"{n} p{node.prio}"
            if node.lits:
                lab += " " + " ".join(sorted(node.lits))
            lines.append(f"  {n} [shape={shape}, label={_q(lab)}];")
        for n in obj.graph_nodes():
            for c in obj.nodes[n].children:
                if obj.nodes[c].is_stub:
                    lines.append(f"  {n} -> {obj.nodes[c].back} [style=dashed];")
                else:
                    lines.append(f"  {n} -> {c};")
    elif isinstance(obj, LabelGraph):
        lines.append("digraph tableau {")
        for n in sorted(obj.labels):
            lab = "{" + ", ".join(print_formula(f) for f in obj.label_formulas(n)) + "}"
            lines.append(f"  {n} [shape=box, label={_q(f'{n} {obj.kinds[n]}: {lab}')}];")
        for n in sorted(obj.children):
            for c in obj.children[n]:
                lines.append(f"  {n} -> {c};")
    elif isinstance(obj, CoreGraph):
        lines.append("digraph core {")
        for n in sorted(obj.kinds):
            lab = f"{n} {obj.kinds[n]}"
            if obj.lits[n]:
                lab += " " + " ".join(sorted(obj.lits[n]))
            lines.append(f"  {n} [label={_q(lab)}];")
        for n in sorted(obj.edges):
            for c in sorted(obj.edges[n]):
                lines.append(f"  {n} -> {c};")
    elif isinstance(obj, Arena):
        lines.append("digraph arena {")
        ids = {p: i for i, p in enumerate(sorted(obj.positions, key=repr))}
        for p, i in sorted(ids.items(), key=lambda kv: kv[1]):
            shape = "diamond" if obj.owner[p] == 0 else "box"
            lines.append(f"  {i} [shape={shape}, label={_q(f'{p} : {obj.priority[p]}')}];")
        for p, i in sorted(ids.items(), key=lambda kv: kv[1]):
            for q in sorted(ids[q] for q in obj.moves.get(p, ())):
                lines.append(f"  {i} -> {q};")
    elif isinstance(obj, KripkeStructure):
        lines.append("digraph structure {")
        for s in sorted(obj.states):
            lab = s + (" " + " ".join(sorted(obj.props.get(s, ()))) if obj.props.get(s) else "")
            extra = ", peripheries=2" if s == obj.init else ""
            lines.append(f"  {_q(s)} [label={_q(lab)}{extra}];")
        for a, b in sorted(obj.edges):
            lines.append(f"  {_q(a)} -> {_q(b)};")
    else:
        raise TypeError(f"cannot export {type(obj).__name__} to DOT")
    lines.append("}")
    return "\n".join(lines) + "\n"
