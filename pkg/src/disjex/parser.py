"""Text format for programs, databases and queries.

Grammar::

    program  := { rule }
    rule     := [ "exists" VAR {"," VAR} ":" ] head [ ":-" body ] "."
    head     := atom { "v" atom }
    body     := atom { "," atom }
    query    := "?-" body "."  |  "?(" [ VAR {"," VAR} ] ")" ":-" body "."
    atom     := IDENT [ "(" term {"," term} ")" ]
    term     := VAR | IDENT | NUMBER | STRING | NULL

Identifiers starting with a lowercase letter are constants and predicates,
uppercase ones are variables, ``_n<i>`` is the null with index i (accepted
only where ``allow_nulls`` is set), ``%`` starts a line comment.  Head
variables absent from the body are existential; a body-free rule with
variables must declare them with ``exists``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .core import (
    Atom,
    Constant,
    Null,
    Program,
    Query,
    Rule,
    Variable,
    vars_of,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span.line}:{span.column}: {message}")
        self.message = message
        self.span = span


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<null>_n[0-9]+)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<number>-?[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>:-|\?-|\?\(|[(),.:])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.col, max(len(self.text), 1))


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                SourceSpan(line, pos - line_start + 1, 1),
            )
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def _unquote(s: str) -> str:
    body = s[1:-1]
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


class _Parser:
    def __init__(self, text: str, allow_nulls: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_nulls = allow_nulls
        self.sig: dict = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.tok
        if t.text != text or t.kind not in ("punct", "ident"):
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.span)
        return self.next()

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "ident") and self.tok.text == text

    def term(self, scope: int):
        t = self.next()
        if t.kind == "var":
            return Variable(t.text, scope)
        if t.kind in ("ident", "number"):
            return Constant(t.text)
        if t.kind == "string":
            return Constant(_unquote(t.text))
        if t.kind == "null":
            if not self.allow_nulls:
                raise ParseError("nulls may not appear in source programs", t.span)
            return Null(int(t.text[2:]))
        raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", t.span)

    def atom(self, scope: int) -> tuple[Atom, _Tok]:
        t = self.tok
        if t.kind != "ident":
            raise ParseError(f"expected a predicate, found {t.text or 'end of input'!r}", t.span)
        self.next()
        args = []
        if self.at("("):
            self.next()
            args.append(self.term(scope))
            while self.at(","):
                self.next()
                args.append(self.term(scope))
            self.expect(")")
        a = Atom(t.text, tuple(args))
        known = self.sig.get(a.predicate)
        if known is None:
            self.sig[a.predicate] = a.arity
        elif known != a.arity:
            raise ParseError(
                f"arity conflict: {a.predicate} used with {a.arity} argument(s), "
                f"previously {known}",
                t.span,
            )
        return a, t

    def body(self, scope: int) -> list[tuple[Atom, _Tok]]:
        out = [self.atom(scope)]
        while self.at(","):
            self.next()
            out.append(self.atom(scope))
        return out

    def rule(self, rid: int) -> Rule:
        start = self.tok
        declared: list[tuple[Variable, _Tok]] = []
        if self.at("exists") and self.toks[self.i + 1].kind == "var":
            self.next()
            while True:
                v = self.tok
                if v.kind != "var":
                    raise ParseError("expected a variable after 'exists'", v.span)
                self.next()
                declared.append((Variable(v.text, rid), v))
                if self.at(","):
                    self.next()
                    continue
                break
            self.expect(":")
        head = [self.atom(rid)]
        while self.at("v") and self.toks[self.i + 1].kind == "ident":
            self.next()
            head.append(self.atom(rid))
        body: list = []
        if self.at(":-"):
            self.next()
            body = self.body(rid)
        self.expect(".")

        head_atoms = tuple(a for a, _ in head)
        body_atoms = tuple(a for a, _ in body)
        body_vars = set(vars_of(body_atoms))
        head_vars = vars_of(head_atoms)
        for v, tok in declared:
            if v in body_vars:
                raise ParseError(f"existential variable {v.name} appears in the body", tok.span)
            if v not in head_vars:
                raise ParseError(f"existential variable {v.name} does not occur in the head", tok.span)
        if not body and head_vars:
            marked = {v for v, _ in declared}
            for a, tok in head:
                for v in a.variables():
                    if v not in marked:
                        raise ParseError(
                            f"variable {v.name} in a body-free rule must be declared with 'exists'",
                            tok.span,
                        )
        exist = tuple(v for v in head_vars if v not in body_vars)
        try:
            return Rule(head_atoms, body_atoms, exist, rid)
        except ValueError as e:
            raise ParseError(str(e), start.span) from None


def parse_program(text: str, allow_nulls: bool = False) -> Program:
    p = _Parser(text, allow_nulls)
    rules = []
    while p.tok.kind != "eof":
        rules.append(p.rule(len(rules) + 1))
    return Program(tuple(rules))


def parse_database(text: str) -> tuple:
    """Ground facts only; returns a tuple of atoms in file order."""
    p = _Parser(text, allow_nulls=False)
    facts = []
    while p.tok.kind != "eof":
        start = p.tok
        r = p.rule(len(facts) + 1)
        if r.body or len(r.head) != 1 or not r.head[0].is_ground():
            raise ParseError("database files may contain only ground facts", start.span)
        facts.append(r.head[0])
    return tuple(dict.fromkeys(facts))


def parse_atom(text: str, allow_nulls: bool = True) -> Atom:
    p = _Parser(text, allow_nulls)
    a, _ = p.atom(0)
    if p.at("."):
        p.next()
    if p.tok.kind != "eof":
        raise ParseError("trailing input after atom", p.tok.span)
    return a


def parse_query(text: str) -> Query:
    p = _Parser(text, allow_nulls=False)
    t = p.tok
    free: list[tuple[Variable, _Tok]] = []
    if p.at("?-"):
        p.next()
    elif p.at("?("):
        p.next()
        if not p.at(")"):
            while True:
                v = p.next()
                if v.kind != "var":
                    raise ParseError("expected a variable in the query header", v.span)
                free.append((Variable(v.text, 0), v))
                if p.at(","):
                    p.next()
                    continue
                break
        p.expect(")")
        p.expect(":-")
    else:
        raise ParseError("a query starts with '?-' or '?('", t.span)
    if p.at("."):
        raise ParseError("query has no atoms", p.tok.span)
    body = p.body(0)
    p.expect(".")
    if p.tok.kind != "eof":
        raise ParseError("trailing input after query", p.tok.span)
    atoms = tuple(a for a, _ in body)
    occurring = set(vars_of(atoms))
    for v, tok in free:
        if v not in occurring:
            raise ParseError(f"free variable {v.name} does not occur in the query body", tok.span)
    return Query(tuple(v for v, _ in free), atoms)


# --------------------------------------------------------------------------
# Printing

_PLAIN_CONST = re.compile(r"(?:[a-z][A-Za-z0-9_]*|-?[0-9]+)\Z")


def format_term(t) -> str:
    if type(t) is Variable:
        return t.name
    if type(t) is Null:
        return f"_n{t.index}"
    if _PLAIN_CONST.match(t.name) and t.name != "v" and t.name != "exists":
        return t.name
    return '"' + t.name.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def format_atom(a: Atom) -> str:
    if not a.args:
        return a.predicate
    return f"{a.predicate}({','.join(format_term(t) for t in a.args)})"


def format_rule(head: Iterable[Atom], body: Iterable[Atom] = (), exist_vars: Iterable = ()) -> str:
    head = list(head)
    body = list(body)
    s = " v ".join(format_atom(a) for a in head)
    ex = list(exist_vars)
    if ex and not body:
        s = "exists " + ",".join(v.name for v in ex) + ": " + s
    if body:
        s += " :- " + ", ".join(format_atom(a) for a in body)
    return s + "."


def print_rule(r) -> str:
    return format_rule(r.head, r.body, getattr(r, "exist_vars", ()))


def print_program(p) -> str:
    rules = p.rules if hasattr(p, "rules") else p
    return "".join(print_rule(r) + "\n" for r in rules)


def print_database(atoms: Iterable[Atom]) -> str:
    return "".join(format_atom(a) + ".\n" for a in atoms)


def print_query(q: Query) -> str:
    body = ", ".join(format_atom(a) for a in q.atoms)
    if q.free_vars:
        return f"?({','.join(v.name for v in q.free_vars)}) :- {body}."
    return f"?- {body}."
