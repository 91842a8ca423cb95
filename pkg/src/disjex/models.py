"""Models of finite ground programs, restricted to their heads.

The search branches over the head atoms of the first violated rule and
propagates singleton heads.  Every subset-minimal model is reached this
way, so the minimal members of ``{M ⊆ heads(g) : M ⊨ g}`` come out exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .core import Atom, Query, Variable, find_homomorphism, sorted_atoms

DEFAULT_MODEL_CAP = 10_000


class CapExceeded(RuntimeError):
    pass


Interpretation = frozenset


@dataclass(frozen=True)
class ModelSet:
    models: tuple
    minimal_only: bool = True
    incomplete: bool = False

    def __iter__(self):
        return iter(self.models)

    def __len__(self):
        return len(self.models)


def satisfies(m: Iterable[Atom], r) -> bool:
    m = m if isinstance(m, (set, frozenset)) else set(m)
    if all(a in m for a in r.body):
        return any(a in m for a in r.head)
    return True


def _rules_of(g):
    return list(g.rules) if hasattr(g, "rules") else list(g)


class Propositional:
    """Ground rules over the heads of ``g`` encoded as integer bitmasks."""

    def __init__(self, rules):
        heads = {a for r in rules for a in r.head}
        self.atoms: list = sorted_atoms(heads)
        self.index = {a: i for i, a in enumerate(self.atoms)}
        self.rules: list = []  # (body_mask, head_mask, head bits in head order)
        self.watch: dict = {}
        for r in rules:
            if any(a not in self.index for a in r.body):
                continue  # can never fire inside heads(g)
            bm = 0
            for a in r.body:
                bm |= 1 << self.index[a]
            bits = list(dict.fromkeys(self.index[a] for a in r.head))
            hm = 0
            for b in bits:
                hm |= 1 << b
            k = len(self.rules)
            self.rules.append((bm, hm, bits))
            for a in r.body:
                self.watch.setdefault(self.index[a], set()).add(k)
        self.free = [k for k, (bm, _, _) in enumerate(self.rules) if bm == 0]
        self.full = (1 << len(self.atoms)) - 1

    def decode(self, mask: int) -> frozenset:
        return frozenset(self.atoms[i] for i in range(len(self.atoms)) if mask >> i & 1)

    def is_model(self, mask: int) -> bool:
        return all(mask & bm != bm or mask & hm for bm, hm, _ in self.rules)

    def propagate(self, mask: int, new: Iterable[int]) -> int:
        """Close ``mask`` under rules with a single head atom."""
        todo = list(new)
        while todo:
            a = todo.pop()
            for k in self.watch.get(a, ()) if a >= 0 else self.free:
                bm, hm, bits = self.rules[k]
                if mask & bm == bm and not mask & hm and len(bits) == 1:
                    mask |= hm
                    todo.append(bits[0])
        return mask

    def start(self) -> int:
        return self.propagate(0, [-1])

    def first_violated(self, mask: int) -> Optional[list]:
        for bm, hm, bits in self.rules:
            if mask & bm == bm and not mask & hm:
                return bits
        return None

    def search(self, prune=None, cap: int = DEFAULT_MODEL_CAP) -> Iterator[int]:
        """Yield models reached by the branching search.

        Every subset-minimal model is yielded (possibly with some supersets).
        ``prune(mask, parent)`` cuts a branch: all models above ``mask`` are
        skipped.  ``parent`` is the state ``mask`` was derived from (None at
        the start), which lets the callback look only at the new atoms.
        """
        found: list = []
        seen: set = set()
        self.states = 0
        stack = [(self.start(), None)]
        states = 0
        while stack:
            m, parent = stack.pop()
            if m in seen:
                continue
            seen.add(m)
            states += 1
            self.states = states
            if states > cap * 50:
                raise CapExceeded(f"model search exceeded {cap * 50} states")
            if prune is not None and prune(m, parent):
                continue
            if any(f & m == f for f in found):
                continue
            bits = self.first_violated(m)
            if bits is None:
                found.append(m)
                if len(found) > cap:
                    raise CapExceeded(f"more than {cap} candidate models")
                yield m
                continue
            for b in reversed(bits):
                if not m >> b & 1:
                    stack.append((self.propagate(m | 1 << b, [b]), m))


def _minimal(masks: list) -> list:
    masks = sorted(set(masks), key=lambda x: (bin(x).count("1"), x))
    out: list = []
    for m in masks:
        if not any(f & m == f for f in out):
            out.append(m)
    return out


def _model_order(m: frozenset):
    return (len(m), sorted(a.key() for a in m))


def enumerate_models(g, minimal_only: bool = True, cap: int = DEFAULT_MODEL_CAP) -> ModelSet:
    """Models M ⊆ heads(g) of the ground program ``g``.

    With ``minimal_only`` the subset-minimal ones, else all of them.
    Raises CapExceeded rather than truncating.
    """
    rules = _rules_of(g)
    prop = Propositional(rules)
    if not prop.is_model(prop.full):
        raise AssertionError("heads(g) must itself be a model of g")
    incomplete = hasattr(g, "complete") and not g.complete
    if minimal_only:
        masks = _minimal(list(prop.search(cap=cap)))
    else:
        masks = _all_models(prop, cap)
    models = sorted((prop.decode(m) for m in masks), key=_model_order)
    return ModelSet(tuple(models), minimal_only, incomplete)


def _all_models(prop: Propositional, cap: int) -> list:
    n = len(prop.atoms)
    out: list = []

    def violated(inside: int, decided: int) -> bool:
        outside = decided & ~inside
        for bm, hm, _ in prop.rules:
            if inside & bm == bm and outside & hm == hm:
                return True
        return False

    def rec(i, inside, decided):
        if violated(inside, decided):
            return
        if i == n:
            out.append(inside)
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} models")
            return
        bit = 1 << i
        rec(i + 1, inside, decided | bit)
        rec(i + 1, inside | bit, decided | bit)

    rec(0, 0, 0)
    return out


def bcq_holds(q: Query, m: Iterable[Atom]) -> bool:
    return find_homomorphism(q.atoms, m) is not None


def bcq_holds_all(q: Query, ms: Iterable) -> bool:
    return all(bcq_holds(q, m) for m in ms)


def universal_covers(ms: Iterable, m: Iterable[Atom]) -> bool:
    m = list(m)
    return any(find_homomorphism(mp, m) is not None for mp in ms)


@dataclass
class Entailment:
    entailed: bool
    countermodel: Optional[frozenset] = None
    states: int = 0
    models: int = 0


def entails(g, q: Query, cap: int = DEFAULT_MODEL_CAP) -> Entailment:
    """Does every model M ⊆ heads(g) of ``g`` satisfy the BCQ ``q``?

    Equivalent to ``bcq_holds_all(q, enumerate_models(g))`` but stops at the
    first countermodel and cuts branches whose partial model already
    satisfies ``q`` (query truth only grows with the model).
    """
    prop = Propositional(_rules_of(g))
    by_pred: dict = {}
    for qa in q.atoms:
        by_pred.setdefault((qa.predicate, qa.arity), []).append(qa)
    relevant = 0
    for i, a in enumerate(prop.atoms):
        if (a.predicate, a.arity) in by_pred:
            relevant |= 1 << i
    memo: dict = {}

    def holds(mask: int, parent=None) -> bool:
        v = memo.get(mask)
        if v is not None:
            return v
        new = mask & relevant if parent is None else mask & ~parent & relevant
        target = None
        v = False
        for i in _bits(new):
            a = prop.atoms[i]
            for qa in by_pred[(a.predicate, a.arity)]:
                seed = _match_atom(qa, a)
                if seed is None:
                    continue
                if len(q.atoms) == 1:
                    v = True
                    break
                if target is None:
                    target = [prop.atoms[j] for j in _bits(mask & relevant)]
                if find_homomorphism(q.atoms, target, seed) is not None:
                    v = True
                    break
            if v:
                break
        memo[mask] = v
        return v

    n = 0
    for m in prop.search(prune=holds, cap=cap):
        n += 1
        if not holds(m):
            return Entailment(False, prop.decode(m), prop.states, n)
    return Entailment(True, None, prop.states, n)


def _bits(x: int) -> list:
    s = bin(x)
    top = len(s) - 1
    out = []
    i = s.find("1", 2)
    while i != -1:
        out.append(top - i)
        i = s.find("1", i + 1)
    return out


def _match_atom(pattern: Atom, fact: Atom) -> Optional[dict]:
    """Binding sending the query atom ``pattern`` onto ``fact``, if any."""
    b: dict = {}
    for s, t in zip(pattern.args, fact.args):
        if type(s) is Variable:
            if b.setdefault(s, t) != t:
                return None
        elif s != t:
            return None
    return b
