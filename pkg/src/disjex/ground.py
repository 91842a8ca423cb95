"""Breadth-first program instantiation and the oblivious chase.

Each repeat-until iteration collects every unspent firing substitution
against the heads derived so far, fires them in (rule order, substitution
order) and only then merges the new rules.  Existential variables receive
the least unused nulls, so runs are reproducible down to null indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .core import Atom, Mapping, Null, Program, Rule, Variable, term_key


class NotDisjunctionFree(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    max_levels: Optional[int] = None
    max_rules: Optional[int] = None

    def __post_init__(self):
        if self.max_levels is None and self.max_rules is None:
            raise ValueError("a budget needs max_levels or max_rules")
        for v in (self.max_levels, self.max_rules):
            if v is not None and v < 0:
                raise ValueError("budget bounds are nonnegative")


DEFAULT_BUDGET = Budget(max_levels=12, max_rules=100_000)


@dataclass(frozen=True, eq=False)
class GroundRule:
    head: tuple
    body: tuple
    level: int
    rule_id: int
    binding: Mapping

    @property
    def key(self) -> tuple:
        return (frozenset(self.head), frozenset(self.body))

    def __eq__(self, other):
        return isinstance(other, GroundRule) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        from .parser import format_rule

        return f"GroundRule<{format_rule(self.head, self.body)} @{self.level}>"


class GroundProgram:
    """An instantiation prefix: ground rules in derivation order."""

    def __init__(self, next_null: int = 1):
        self.rules: list[GroundRule] = []
        self.heads: set = set()
        self.next_null = next_null
        self.complete = False
        self.levels = 0
        self._keys: set = set()

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __contains__(self, gr: GroundRule) -> bool:
        return gr.key in self._keys

    def add(self, gr: GroundRule) -> bool:
        if gr.key in self._keys:
            return False
        self._keys.add(gr.key)
        self.rules.append(gr)
        self.heads.update(gr.head)
        return True

    def fresh_null(self) -> Null:
        n = Null(self.next_null)
        self.next_null += 1
        return n

    def level(self, k: int) -> list[GroundRule]:
        return [r for r in self.rules if r.level == k]

    def prefix(self, k: int) -> list[GroundRule]:
        return [r for r in self.rules if r.level <= k]


def max_null(atoms: Iterable[Atom]) -> int:
    return max((t.index for a in atoms for t in a.nulls()), default=0)


# --------------------------------------------------------------------------
# Joins


def _match(pattern: Atom, fact: Atom, binding: dict) -> Optional[list]:
    added = []
    for s, t in zip(pattern.args, fact.args):
        if type(s) is Variable:
            cur = binding.get(s)
            if cur is None:
                binding[s] = t
                added.append(s)
                continue
            if cur == t:
                continue
        elif s == t:
            continue
        for v in added:
            del binding[v]
        return None
    return added


def _join(body: Sequence[Atom], sources: Sequence[dict], binding: dict) -> Iterator[dict]:
    """Bindings mapping body[i] into sources[i] (an index pred -> atoms)."""
    if not body:
        yield dict(binding)
        return
    a, rest = body[0], body[1:]
    for f in sources[0].get((a.predicate, a.arity), ()):
        added = _match(a, f, binding)
        if added is None:
            continue
        yield from _join(rest, sources[1:], binding)
        for v in added:
            del binding[v]


def _index(atoms: Iterable[Atom]) -> dict:
    idx: dict = {}
    for a in atoms:
        idx.setdefault((a.predicate, a.arity), []).append(a)
    return idx


def _sort_key(r: Rule):
    xs = r.universal_vars
    return lambda s: tuple(term_key(s[v]) for v in xs)


def _all_firings(r: Rule, idx: dict) -> list[dict]:
    xs = r.universal_vars
    found = {tuple(s[v] for v in xs): s for s in _join(r.body, [idx] * len(r.body), {})}
    return sorted(found.values(), key=_sort_key(r))


def _new_firings(r: Rule, old: dict, delta: dict, full: dict) -> list[dict]:
    """Semi-naive: bindings using at least one delta atom."""
    n = len(r.body)
    xs = r.universal_vars
    found = {}
    for i in range(n):
        sources = [old] * i + [delta] + [full] * (n - i - 1)
        for s in _join(r.body, sources, {}):
            found[tuple(s[v] for v in xs)] = s
    return sorted(found.values(), key=_sort_key(r))


def _spent_key(r: Rule, s: dict) -> tuple:
    return (r.id, tuple(s[v] for v in r.universal_vars))


def firing_substitutions(r: Rule, g) -> list[Mapping]:
    """All σ over the universal variables of ``r`` with σ(body(r)) ⊆ heads(g),
    in the global term order.  A body-free rule yields the identity."""
    heads = g.heads if hasattr(g, "heads") else g
    return [Mapping(s) for s in _all_firings(r, _index(heads))]


def _extend(r: Rule, s: dict, alloc) -> dict:
    full = dict(s)
    for y in r.exist_vars:
        full[y] = alloc.fresh_null()
    return full


def fire(r: Rule, s, g: GroundProgram, level: int = 0) -> GroundRule:
    """Ground ``r`` under ``s`` extended with fresh nulls for its existential
    variables (in their order in ``r``); advances ``g``'s null allocator."""
    base = s.as_dict() if isinstance(s, Mapping) else dict(s)
    full = Mapping(_extend(r, base, g))
    return GroundRule(full.apply_all(r.head), full.apply_all(r.body), level, r.id, Mapping(base))


def _start(p: Program, g: GroundProgram) -> None:
    g.next_null = max(g.next_null, max_null(a for r in p.rules for a in r.atoms()) + 1)


def instantiate(p: Program, budget: Budget = None) -> GroundProgram:
    """Level-by-level instantiation prefix of ``p`` under ``budget``.

    ``complete`` is True iff the next iteration would produce nothing.
    """
    budget = budget or DEFAULT_BUDGET
    g = GroundProgram()
    _start(p, g)
    spent: set = set()
    old: dict = {}
    delta: dict = {}
    full: dict = {}
    level = 0
    while True:
        pending = []
        for r in p.rules:
            if not r.body:
                subs = [{}] if level == 0 else []
            else:
                subs = _new_firings(r, old, delta, full) if delta else []
            for s in subs:
                k = _spent_key(r, s)
                if k not in spent:
                    pending.append((r, s, k))
        if not pending:
            g.complete = True
            return g
        if budget.max_levels is not None and level >= budget.max_levels:
            return g
        level += 1
        known = set(g.heads)
        new_heads: list = []
        for r, s, k in pending:
            if budget.max_rules is not None and len(g.rules) >= budget.max_rules:
                g.levels = level
                return g
            spent.add(k)
            gr = fire(r, s, g, level)
            if g.add(gr):
                for a in gr.head:
                    if a not in known:
                        known.add(a)
                        new_heads.append(a)
        g.levels = level
        old = _merge(old, delta)
        delta = _index(new_heads)
        full = _merge(old, delta)


def _merge(a: dict, b: dict) -> dict:
    out = {k: list(v) for k, v in a.items()}
    for k, v in b.items():
        out.setdefault(k, []).extend(v)
    return out


@dataclass
class ChaseResult:
    atoms: frozenset
    complete: bool
    levels: int
    by_level: list = field(default_factory=list)


def oblivious_chase(p: Program, budget: Budget = None) -> ChaseResult:
    """The disjunction-free specialisation: accumulate head atoms, not rules."""
    budget = budget or DEFAULT_BUDGET
    for r in p.rules:
        if len(r.head) != 1:
            raise NotDisjunctionFree(f"rule {r.id} has a disjunctive head")

    class _Alloc:
        next_null = max_null(a for r in p.rules for a in r.atoms()) + 1

        def fresh_null(self):
            n = Null(self.next_null)
            self.next_null += 1
            return n

    alloc = _Alloc()
    atoms: set = set()
    by_level: list = []
    spent: set = set()
    seen: set = set()
    level = 0
    fired = 0
    while True:
        idx = _index(sorted(atoms, key=lambda a: a.key()))
        pending = []
        for r in p.rules:
            for s in _all_firings(r, idx):
                k = _spent_key(r, s)
                if k not in spent:
                    pending.append((r, s, k))
        if not pending:
            return ChaseResult(frozenset(atoms), True, level, by_level)
        if budget.max_levels is not None and level >= budget.max_levels:
            return ChaseResult(frozenset(atoms), False, level, by_level)
        level += 1
        staged: list = []
        for r, s, k in pending:
            if budget.max_rules is not None and fired >= budget.max_rules:
                atoms.update(staged)
                by_level.append(frozenset(staged))
                return ChaseResult(frozenset(atoms), False, level, by_level)
            spent.add(k)
            full = Mapping(_extend(r, s, alloc))
            head = full.apply(r.head[0])
            # the rule budget counts distinct ground rules, as in instantiate
            key = (head, frozenset(full.apply_all(r.body)))
            if key not in seen:
                seen.add(key)
                fired += 1
            staged.append(head)
        atoms.update(staged)
        by_level.append(frozenset(staged))
