"""Program-to-program rewritings."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .classify import classify, weak_guard
from .core import (
    IDENTITY,
    Atom,
    Constant,
    Mapping,
    Program,
    Query,
    Rule,
    term_key,
    vars_of,
)
from .parser import format_atom

EDB = Atom("edb", ())


class NotWeaklyGuarded(ValueError):
    pass


class NotGuarded(ValueError):
    pass


class EmptyConstantDomain(ValueError):
    pass


def edb_rewrite(p: Program, d: Iterable[Atom]) -> tuple[Program, tuple]:
    """Give every body-free rule the body ``edb`` and add ``edb`` to the data."""
    d = tuple(d)
    if all(r.body for r in p.rules):
        return p, d
    rules = [Rule(r.head, r.body or (EDB,), r.exist_vars, r.id) for r in p.rules]
    return Program(tuple(rules)), d + ((EDB,) if EDB not in d else ())


def winst(p: Program) -> Program:
    """Weak instantiation: ground the unguarded variables of each rule over
    the constants of ``p``.  The result is guarded."""
    report = classify(p)
    if not report.is_weakly_guarded:
        bad = [d.id for d in report.rules if not d.weakly_guarded]
        raise NotWeaklyGuarded(f"rules {bad} have no weak guard")
    aff = report.affected
    consts = p.constants()
    out: list[Rule] = []
    for r in p.rules:
        if not r.body:
            out.append(r)
            continue
        g = weak_guard(r, aff)
        inside = set(g.variables())
        loose = [v for v in r.universal_vars if v not in inside]
        if not loose:
            out.append(r)
            continue
        if not consts:
            raise EmptyConstantDomain(
                f"rule {r.id} has unguarded variables but the program has no constants; "
                "merge the database (or apply edb_rewrite) first"
            )
        for combo in itertools.product(consts, repeat=len(loose)):
            s = Mapping(dict(zip(loose, combo)))
            out.append(Rule(s.apply_all(r.head), s.apply_all(r.body), r.exist_vars, r.id))
    return Program.from_rules(out)


# --------------------------------------------------------------------------
# Guarded first-order formulas


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Implies:
    """``consequent <- antecedent``."""

    consequent: "Formula"
    antecedent: "Formula"


@dataclass(frozen=True)
class Exists:
    """``exists vars (guard & body)``; a missing body means the guard alone."""

    vars: tuple
    guard: Atom
    body: Optional["Formula"] = None


@dataclass(frozen=True)
class Forall:
    """``forall vars (body <- guard)``."""

    vars: tuple
    guard: Atom
    body: "Formula"


Formula = Union[Atom, Not, Or, And, Implies, Exists, Forall]


def free_vars(f) -> set:
    if isinstance(f, Atom):
        return set(f.variables())
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (Or, And)):
        return set().union(*(free_vars(a) for a in f.args))
    if isinstance(f, Implies):
        return free_vars(f.consequent) | free_vars(f.antecedent)
    inner = set(f.guard.variables())
    if f.body is not None:
        inner |= free_vars(f.body)
    return inner - set(f.vars)


def is_guarded_formula(f) -> bool:
    """Every quantifier's guard covers the free variables of its scope."""
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return is_guarded_formula(f.arg)
    if isinstance(f, (Or, And)):
        return all(is_guarded_formula(a) for a in f.args)
    if isinstance(f, Implies):
        return is_guarded_formula(f.consequent) and is_guarded_formula(f.antecedent)
    gv = set(f.guard.variables())
    if not set(f.vars) <= gv:
        return False
    if f.body is None:
        return True
    return free_vars(f.body) <= gv and is_guarded_formula(f.body)


def rule_to_fol(r: Rule) -> Formula:
    ex = set(r.exist_vars)
    disj = []
    for h in r.head:
        ys = tuple(v for v in vars_of([h]) if v in ex)
        disj.append(Exists(ys, h) if ys else h)
    if not r.body:
        return disj[0] if len(disj) == 1 else Or(tuple(disj))
    xs = vars_of(r.body)
    body = list(dict.fromkeys(r.body))
    guard = next((a for a in body if set(xs) <= set(a.variables())), None)
    if guard is None:
        raise NotGuarded(f"rule {r.id} has no guard")
    sides = [a for a in body if a != guard]
    if sides:
        disj.append(Not(sides[0] if len(sides) == 1 else And(tuple(sides))))
    psi = disj[0] if len(disj) == 1 else Or(tuple(disj))
    if not xs:
        return Implies(psi, guard)
    return Forall(xs, guard, psi)


def to_guarded_fol(p: Program) -> list:
    """One guarded formula per rule; the program is their conjunction."""
    return [rule_to_fol(r) for r in p.rules]


def format_formula(f) -> str:
    if isinstance(f, Atom):
        return format_atom(f)
    if isinstance(f, Not):
        inner = format_formula(f.arg)
        return "~" + (inner if isinstance(f.arg, Atom) else f"({inner})")
    if isinstance(f, Or):
        return " | ".join(_wrap(a) for a in f.args)
    if isinstance(f, And):
        return " & ".join(_wrap(a) for a in f.args)
    if isinstance(f, Implies):
        return f"({format_formula(f.consequent)} <- {format_formula(f.antecedent)})"
    names = ",".join(v.name for v in f.vars)
    if isinstance(f, Exists):
        if f.body is None:
            return f"exists {names}. {format_atom(f.guard)}"
        return f"exists {names}. ({format_atom(f.guard)} & {format_formula(f.body)})"
    return f"forall {names}. ({format_formula(f.body)} <- {format_atom(f.guard)})"


def _wrap(f) -> str:
    s = format_formula(f)
    return f"({s})" if isinstance(f, (Or, And)) else s


# --------------------------------------------------------------------------
# Non-Boolean queries


def query_constants(p: Program, d: Iterable[Atom] = ()) -> list:
    cs = set(p.constants())
    cs.update(t for a in d for t in a.args if type(t) is Constant)
    return sorted(cs, key=term_key)


def cq_to_bcq_instances(q: Query, p: Program, d: Iterable[Atom] = ()) -> Iterator[tuple]:
    """Every grounding of the free variables over the constants of P ∪ D."""
    if q.is_boolean:
        yield IDENTITY, q
        return
    consts = query_constants(p, d)
    for combo in itertools.product(consts, repeat=len(q.free_vars)):
        s = Mapping(dict(zip(q.free_vars, combo)))
        yield s, Query((), s.apply_all(q.atoms))
