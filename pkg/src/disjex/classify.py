"""Fragment membership: guarded, multi-linear, linear, monadic-linear and
weakly-guarded programs, plus acyclicity of conjunctive queries."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

from .core import Atom, Program, Query, Rule, Variable, vars_of
from .parser import format_atom, print_rule

Position = tuple  # (predicate, 1-based position)


def affected_positions(p: Program) -> frozenset:
    """Least fixpoint of the affected-position marking.

    A head position is affected when it holds an existential variable, or a
    universal variable whose body occurrences are all at affected positions.
    """
    affected: set = set()
    changed = True
    while changed:
        changed = False
        for r in p.rules:
            ex = set(r.exist_vars)
            body_pos: dict = {}
            for a in r.body:
                for i, t in enumerate(a.args, 1):
                    if type(t) is Variable:
                        body_pos.setdefault(t, []).append((a.predicate, i))
            for b in r.head:
                for i, t in enumerate(b.args, 1):
                    pos = (b.predicate, i)
                    if pos in affected or type(t) is not Variable:
                        continue
                    if t in ex or (t in body_pos and all(q in affected for q in body_pos[t])):
                        affected.add(pos)
                        changed = True
    return frozenset(affected)


def affected_variables(r: Rule, affected: frozenset) -> tuple:
    """Body variables occurring in the body only at affected positions."""
    occ: dict = {}
    for a in r.body:
        for i, t in enumerate(a.args, 1):
            if type(t) is Variable:
                occ.setdefault(t, []).append((a.predicate, i))
    return tuple(v for v in vars_of(r.body) if all(q in affected for q in occ[v]))


@dataclass
class RuleDiagnosis:
    id: int
    text: str
    body_free: bool
    guard_candidates: list = field(default_factory=list)
    weak_guard_candidates: list = field(default_factory=list)
    unguarded_vars: list = field(default_factory=list)
    affected_vars: list = field(default_factory=list)
    guarded: bool = True
    multi_linear: bool = True
    linear: bool = True
    monadic_linear: bool = True
    weakly_guarded: bool = True


@dataclass
class ClassReport:
    is_guarded: bool
    is_multi_linear: bool
    is_linear: bool
    is_monadic_linear: bool
    is_weakly_guarded: bool
    is_disjunction_free: bool
    is_existential_free: bool
    affected: frozenset
    rules: list

    def to_json(self) -> dict:
        return {
            "guarded": self.is_guarded,
            "multi_linear": self.is_multi_linear,
            "linear": self.is_linear,
            "monadic_linear": self.is_monadic_linear,
            "weakly_guarded": self.is_weakly_guarded,
            "disjunction_free": self.is_disjunction_free,
            "existential_free": self.is_existential_free,
            "affected": [f"{p}[{i}]" for p, i in sorted(self.affected)],
            "rules": [asdict(d) for d in self.rules],
        }


def _covers(a: Atom, vs) -> bool:
    mine = set(a.variables())
    return all(v in mine for v in vs)


def weak_guard(r: Rule, affected: frozenset) -> Optional[Atom]:
    """The weak guard used by ``winst``: among body atoms covering every
    affected variable, the one with the most variables (first on ties)."""
    aff = affected_variables(r, affected)
    cands = [a for a in dict.fromkeys(r.body) if _covers(a, aff)]
    if not cands:
        return None
    return max(cands, key=lambda a: (len(set(a.variables())), -r.body.index(a)))


def diagnose(r: Rule, affected: frozenset) -> RuleDiagnosis:
    d = RuleDiagnosis(r.id, print_rule(r), body_free=not r.body)
    if not r.body:
        return d
    body = list(dict.fromkeys(r.body))
    xs = vars_of(body)
    guards = [a for a in body if _covers(a, xs)]
    aff = affected_variables(r, affected)
    weak = [a for a in body if _covers(a, aff)]
    d.guard_candidates = [format_atom(a) for a in guards]
    d.weak_guard_candidates = [format_atom(a) for a in weak]
    d.affected_vars = [v.name for v in aff]
    wg = weak_guard(r, affected)
    if wg is not None:
        inside = set(wg.variables())
        d.unguarded_vars = [v.name for v in xs if v not in inside]
    d.guarded = bool(guards)
    d.multi_linear = len(guards) == len(body)
    d.linear = len(body) == 1
    d.monadic_linear = d.linear and all(a.arity == 1 for a in r.head)
    d.weakly_guarded = bool(weak)
    return d


def classify(p: Program) -> ClassReport:
    aff = affected_positions(p)
    diags = [diagnose(r, aff) for r in p.rules]
    return ClassReport(
        is_guarded=all(d.guarded for d in diags),
        is_multi_linear=all(d.multi_linear for d in diags),
        is_linear=all(d.linear for d in diags),
        is_monadic_linear=all(d.monadic_linear for d in diags),
        is_weakly_guarded=all(d.weakly_guarded for d in diags),
        is_disjunction_free=all(len(r.head) == 1 for r in p.rules),
        is_existential_free=all(not r.exist_vars for r in p.rules),
        affected=aff,
        rules=diags,
    )


def is_acyclic_query(q: Query) -> bool:
    """α-acyclicity of the query hypergraph by GYO reduction."""
    edges = [set(a.variables()) for a in q.atoms]
    changed = True
    while changed and edges:
        changed = False
        count: dict = {}
        for e in edges:
            for v in e:
                count[v] = count.get(v, 0) + 1
        for e in edges:
            lonely = {v for v in e if count[v] == 1}
            if lonely:
                e -= lonely
                changed = True
        for i, e in enumerate(edges):
            if any(j != i and e <= f for j, f in enumerate(edges)) or not e:
                del edges[i]
                changed = True
                break
    return not edges
