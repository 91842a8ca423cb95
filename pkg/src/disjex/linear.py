"""Atomic query answering over linear programs via instantiation trees.

For a linear program every ground rule has a single body atom, so the
rules reachable from one database atom form a tree.  Cutting each path at
the first body that is isomorphic to an earlier one on the same path gives
a finite stem whose rules already decide any atomic query.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .classify import classify
from .core import Atom, Program, Query, canonical_form
from .ground import GroundProgram, GroundRule, _join, _index, _sort_key, fire
from .models import DEFAULT_MODEL_CAP, entails
from .parser import format_rule
from .transform import edb_rewrite

DEFAULT_MAX_NODES = 200_000


class NotLinear(ValueError):
    pass


class NotAtomic(ValueError):
    pass


class TreeTooLarge(RuntimeError):
    pass


def depth_bound(p: Program) -> int:
    """``|π| · (2w)^w`` for predicate count π and maximum arity w."""
    w = p.max_arity()
    return len(p.signature) * (2 * w) ** w


@dataclass
class Node:
    id: int
    label: GroundRule
    parent: Optional[int]
    depth: int


@dataclass
class InstTree:
    nodes: list = field(default_factory=list)
    pruned: list = field(default_factory=list)  # (parent id, GroundRule)

    @property
    def root(self) -> Node:
        return self.nodes[0]

    def children(self, i: int) -> list:
        return [n for n in self.nodes if n.parent == i]

    def path(self, i: int) -> list:
        out = []
        while i is not None:
            n = self.nodes[i]
            out.append(n)
            i = n.parent
        return out[::-1]

    def max_depth(self) -> int:
        return max(n.depth for n in self.nodes)

    def labels(self) -> list:
        return list(dict.fromkeys(n.label for n in self.nodes))

    def dump(self) -> str:
        kids: dict = {}
        for n in self.nodes[1:]:
            kids.setdefault(n.parent, []).append(n)
        cut: dict = {}
        for parent, gr in self.pruned:
            cut.setdefault(parent, []).append(gr)
        lines: list = []

        def walk(n: Node):
            pad = "  " * n.depth
            lines.append(pad + format_rule(n.label.head, n.label.body))
            for c in kids.get(n.id, ()):
                walk(c)
            for gr in cut.get(n.id, ()):
                lines.append(pad + "  %% stem-pruned " + format_rule(gr.head, gr.body))

        walk(self.root)
        return "\n".join(lines) + "\n"


@dataclass
class Stem:
    tree: InstTree

    @property
    def sinst(self) -> list:
        return self.tree.labels()


def _check_linear(p: Program) -> None:
    bad = [r.id for r in p.rules if len(r.body) > 1]
    if bad:
        raise NotLinear(f"rules {bad} have more than one body atom")


class _Firings:
    """Tree-wide cache so a (rule, substitution) pair always yields the
    same ground rule, as in the instantiation itself."""

    def __init__(self, p: Program, a: Atom):
        self.p = p
        self.alloc = GroundProgram()
        self.alloc.next_null = max((t.index for t in a.nulls()), default=0) + 1
        self.cache: dict = {}

    def children(self, label: GroundRule) -> list[GroundRule]:
        out: list = []
        for h in dict.fromkeys(label.head):
            idx = _index([h])
            for r in self.p.rules:
                if not r.body:
                    continue  # facts never hang below a node
                subs = sorted(_join(r.body, [idx], {}), key=_sort_key(r))
                for s in subs:
                    key = (r.id, tuple(s[v] for v in r.universal_vars))
                    gr = self.cache.get(key)
                    if gr is None:
                        gr = fire(r, s, self.alloc)
                        self.cache[key] = gr
                    out.append(gr)
        return out


def _grow(p: Program, a: Atom, depth: Optional[int], stem: bool, max_nodes: int) -> InstTree:
    _check_linear(p)
    if not a.is_ground():
        raise ValueError("the root atom must be ground")
    firings = _Firings(p, a)
    root = GroundRule((a,), (), 0, 0, None)
    tree = InstTree([Node(0, root, None, 0)])
    body_forms = {0: ()}  # node id -> canonical forms of bodies on its path
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            n = tree.nodes[i]
            if depth is not None and n.depth >= depth:
                continue
            for gr in firings.children(n.label):
                form = canonical_form(gr.body)
                if stem and form in body_forms[i]:
                    tree.pruned.append((i, gr))
                    continue
                if len(tree.nodes) >= max_nodes:
                    raise TreeTooLarge(f"instantiation tree exceeds {max_nodes} nodes")
                c = Node(len(tree.nodes), gr, i, n.depth + 1)
                tree.nodes.append(c)
                body_forms[c.id] = body_forms[i] + (form,)
                nxt.append(c.id)
        frontier = nxt
    return tree


def build_tree(p: Program, a: Atom, depth_bound: int, max_nodes: int = DEFAULT_MAX_NODES) -> InstTree:
    """Breadth-first instantiation tree rooted at the fact ``a``, cut at depth ``depth_bound``."""
    return _grow(p, a, depth_bound, False, max_nodes)


def build_stem(p: Program, a: Atom, max_nodes: int = DEFAULT_MAX_NODES) -> Stem:
    return Stem(_grow(p, a, None, True, max_nodes))


@dataclass
class StemAnswer:
    entailed: bool
    witness: Optional[Atom] = None
    stems: int = 0
    rules: int = 0
    max_depth: int = 0
    models: int = 0


def stem_qa(p: Program, d: Iterable[Atom], q: Query, cap: int = DEFAULT_MODEL_CAP) -> StemAnswer:
    if not q.is_boolean or not q.is_atomic:
        raise NotAtomic("the stem engine answers atomic Boolean queries only")
    p2, d2 = edb_rewrite(p, d)
    if not classify(p2).is_linear:
        raise NotLinear("program is not linear")
    out = StemAnswer(False)
    for a in sorted(dict.fromkeys(d2), key=lambda x: x.key()):
        stem = build_stem(p2, a)
        rules = stem.sinst
        res = entails(rules, q, cap)
        out.stems += 1
        out.rules += len(rules)
        out.max_depth = max(out.max_depth, stem.tree.max_depth())
        out.models += res.models
        if res.entailed:
            out.entailed = True
            out.witness = a
            return out
    return out


def atomic_qa_linear(p: Program, d: Iterable[Atom], q: Query, cap: int = DEFAULT_MODEL_CAP) -> bool:
    """``P ∪ D ⊨ q`` for linear ``p`` and atomic Boolean ``q``: true iff the
    stem of some single database atom entails ``q``."""
    return stem_qa(p, d, q, cap).entailed


def subtree_structure(tree: InstTree, i: int, depth: int) -> list[GroundRule]:
    """Labels of the subtree below node ``i`` down to ``depth`` further levels."""
    out = []
    frontier = [(i, 0)]
    kids: dict = {}
    for n in tree.nodes[1:]:
        kids.setdefault(n.parent, []).append(n.id)
    while frontier:
        j, k = frontier.pop()
        out.append(tree.nodes[j].label)
        if k < depth:
            frontier.extend((c, k + 1) for c in kids.get(j, ()))
    return out
