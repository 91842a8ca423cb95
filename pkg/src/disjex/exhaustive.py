"""Brute-force reference semantics over a fixed finite set of terms.

Every rule is grounded over ``terms`` directly from its definition: for a
binding of the universal variables, the existential quantifier turns into a
disjunction over all bindings of the existential variables.  The models of
the resulting clause set are then enumerated bit by bit in
:mod:`disjex.kernels`.  Nothing here shares code with the instantiation
procedure, which is what makes it useful as a test oracle.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import Mapping, Program, Query, find_homomorphism, sorted_atoms, term_key
from .kernels import MAX_ATOMS, masks_to_sets, minimal_flags, model_flags


@dataclass(frozen=True)
class Clause:
    head: frozenset
    body: frozenset


def ground_over_terms(p: Program, terms: Iterable) -> list[Clause]:
    terms = sorted(set(terms), key=term_key)
    out: dict = {}
    for r in p.rules:
        xs, ys = r.universal_vars, r.exist_vars
        for xb in itertools.product(terms, repeat=len(xs)):
            s = dict(zip(xs, xb))
            body = frozenset(Mapping(s).apply_all(r.body))
            head: set = set()
            for yb in itertools.product(terms, repeat=len(ys)):
                head.update(Mapping({**s, **dict(zip(ys, yb))}).apply_all(r.head))
            c = Clause(frozenset(head), body)
            out.setdefault((c.head, c.body), c)
    return list(out.values())


def exhaustive_models(p: Program, terms: Iterable, minimal_only: bool = True) -> list[frozenset]:
    """Models of ``p`` whose atoms are built from ``terms``.

    Only atoms occurring in some clause head can belong to a minimal model,
    so with ``minimal_only`` the search ranges over those.  Without it the
    result lists models over the same atom set (any atom outside it may be
    added freely).
    """
    clauses = ground_over_terms(p, terms)
    atoms = sorted_atoms({a for c in clauses for a in c.head})
    if len(atoms) > MAX_ATOMS:
        raise ValueError(f"{len(atoms)} candidate atoms exceed the exhaustive limit {MAX_ATOMS}")
    index = {a: i for i, a in enumerate(atoms)}
    body, head = [], []
    for c in clauses:
        if any(a not in index for a in c.body):
            continue
        body.append(sum(1 << index[a] for a in c.body))
        head.append(sum(1 << index[a] for a in c.head))
    flags = model_flags(len(atoms), np.array(body, dtype=np.uint64), np.array(head, dtype=np.uint64))
    if minimal_only:
        flags = minimal_flags(flags)
    return [frozenset(atoms[i] for i in range(len(atoms)) if m >> i & 1) for m in masks_to_sets(flags)]


def exhaustive_entails(p: Program, terms: Iterable, q: Query) -> bool:
    return all(find_homomorphism(q.atoms, m) is not None for m in exhaustive_models(p, terms))
