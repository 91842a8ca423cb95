"""Terms, atoms, rules, programs, queries and the mapping algebra.

Three disjoint term domains are used throughout: constants, labelled nulls
and variables.  All values are immutable.  A single global order on terms
(constants < nulls < variables) makes every procedure in the package
reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain
from typing import Iterable, Iterator, Mapping as TMapping, Optional, Union


@dataclass(frozen=True, slots=True)
class Constant:
    name: str

    def __repr__(self) -> str:
        return f"Constant({self.name!r})"


@dataclass(frozen=True, slots=True)
class Null:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"null indices are positive, got {self.index}")

    def __repr__(self) -> str:
        return f"Null({self.index})"


@dataclass(frozen=True, slots=True)
class Variable:
    """A variable; ``scope`` is the ordinal of the owning rule (0 for queries).

    Scoping keeps rules standardized apart without mangling the printed name.
    """

    name: str
    scope: int = 0

    def __repr__(self) -> str:
        return f"Variable({self.name!r}, {self.scope})"


Term = Union[Constant, Null, Variable]


def term_key(t: Term) -> tuple:
    if type(t) is Constant:
        return (0, t.name, 0)
    if type(t) is Null:
        return (1, "", t.index)
    return (2, t.name, t.scope)


def is_ground_term(t: Term) -> bool:
    return type(t) is not Variable


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> Iterator[Variable]:
        return (t for t in self.args if type(t) is Variable)

    def nulls(self) -> Iterator[Null]:
        return (t for t in self.args if type(t) is Null)

    def is_ground(self) -> bool:
        return all(type(t) is not Variable for t in self.args)

    def key(self) -> tuple:
        return (self.predicate, tuple(term_key(t) for t in self.args))

    def __repr__(self) -> str:
        return f"Atom({self.predicate!r}, {self.args!r})"


def atom(predicate: str, *args) -> Atom:
    """Convenience constructor: ``str`` args starting uppercase become
    variables, ``int`` args become nulls, other strings constants."""
    terms = []
    for a in args:
        if isinstance(a, (Constant, Null, Variable)):
            terms.append(a)
        elif isinstance(a, int):
            terms.append(Null(a))
        elif a[:1].isupper():
            terms.append(Variable(a))
        else:
            terms.append(Constant(a))
    return Atom(predicate, tuple(terms))


def atom_key(a: Atom) -> tuple:
    return a.key()


def sorted_atoms(atoms: Iterable[Atom]) -> list[Atom]:
    return sorted(atoms, key=atom_key)


def _ordered_unique(items: Iterable) -> tuple:
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


def vars_of(atoms: Iterable[Atom]) -> tuple[Variable, ...]:
    """Variables of ``atoms`` in order of first occurrence."""
    return _ordered_unique(v for a in atoms for v in a.variables())


def terms_of(atoms: Iterable[Atom]) -> set:
    return {t for a in atoms for t in a.args}


class ArityError(ValueError):
    def __init__(self, predicate: str, expected: int, got: int):
        super().__init__(
            f"predicate {predicate!r} used with arity {got}, expected {expected}"
        )
        self.predicate = predicate
        self.expected = expected
        self.got = got


@dataclass(frozen=True)
class Rule:
    """``exists exist_vars . head[0] v head[1] v ... <- body``.

    ``exist_vars`` is ordered by first occurrence in the head; the order
    decides which fresh null each existential variable receives.
    """

    head: tuple
    body: tuple = ()
    exist_vars: tuple = ()
    id: int = 0

    def __post_init__(self):
        if not self.head:
            raise ValueError("rule head must be a nonempty disjunction")
        body_vars = set(vars_of(self.body))
        head_vars = set(vars_of(self.head))
        ex = set(self.exist_vars)
        if ex & body_vars:
            names = ", ".join(sorted(v.name for v in ex & body_vars))
            raise ValueError(f"existential variable(s) {names} occur in the body")
        if not ex <= head_vars:
            raise ValueError("existential variables must occur in the head")
        free = head_vars - body_vars - ex
        if free:
            names = ", ".join(sorted(v.name for v in free))
            raise ValueError(f"head variable(s) {names} are neither bound nor existential")

    @cached_property
    def universal_vars(self) -> tuple[Variable, ...]:
        return vars_of(self.body)

    @property
    def is_fact(self) -> bool:
        return not self.body and len(self.head) == 1

    @property
    def is_ground(self) -> bool:
        return all(a.is_ground() for a in chain(self.head, self.body))

    def atoms(self) -> Iterator[Atom]:
        return chain(self.head, self.body)

    def rescoped(self, new_id: int) -> "Rule":
        """The same rule with id ``new_id`` and its variables moved to that scope."""
        def mv(t):
            return Variable(t.name, new_id) if type(t) is Variable else t

        def ma(a):
            return Atom(a.predicate, tuple(mv(t) for t in a.args))

        return Rule(
            tuple(ma(a) for a in self.head),
            tuple(ma(a) for a in self.body),
            tuple(mv(v) for v in self.exist_vars),
            new_id,
        )


def _signature_of(atoms: Iterable[Atom], sig: Optional[dict] = None) -> dict:
    sig = {} if sig is None else sig
    for a in atoms:
        known = sig.get(a.predicate)
        if known is None:
            sig[a.predicate] = a.arity
        elif known != a.arity:
            raise ArityError(a.predicate, known, a.arity)
    return sig


@dataclass(frozen=True)
class Program:
    rules: tuple = ()
    signature: TMapping = field(default_factory=dict)

    def __post_init__(self):
        sig = _signature_of(a for r in self.rules for a in r.atoms())
        for p, k in dict(self.signature).items():
            if sig.setdefault(p, k) != k:
                raise ArityError(p, k, sig[p])
        object.__setattr__(self, "signature", sig)

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> "Program":
        """Renumber rules 1..n and standardize them apart."""
        return cls(tuple(r.rescoped(i) for i, r in enumerate(rules, 1)))

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    @property
    def heads(self) -> frozenset:
        return frozenset(a for r in self.rules for a in r.head)

    def predicates(self) -> set[str]:
        return set(self.signature)

    def constants(self) -> list[Constant]:
        cs = {t for r in self.rules for a in r.atoms() for t in a.args if type(t) is Constant}
        return sorted(cs, key=term_key)

    def max_arity(self) -> int:
        return max(self.signature.values(), default=0)

    def with_facts(self, facts: Iterable[Atom]) -> "Program":
        """``P ∪ D``: append one body-free rule per database atom."""
        extra = [Rule((a,)) for a in facts]
        return Program.from_rules(list(self.rules) + extra)


@dataclass(frozen=True)
class Query:
    """``?(free_vars) :- atoms``; remaining variables are existential."""

    free_vars: tuple
    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("query needs at least one atom")
        occurring = set(vars_of(self.atoms))
        missing = [v for v in self.free_vars if v not in occurring]
        if missing:
            raise ValueError(
                "free variable(s) not occurring in the query body: "
                + ", ".join(v.name for v in missing)
            )

    @property
    def is_boolean(self) -> bool:
        return not self.free_vars

    @property
    def is_atomic(self) -> bool:
        return len(self.atoms) == 1

    @property
    def variables(self) -> tuple[Variable, ...]:
        return vars_of(self.atoms)


Database = tuple  # tuple of ground Atom over constants


# --------------------------------------------------------------------------
# Mappings


class Mapping:
    """A term-to-term map that is the identity outside a finite support.

    Constants always map to themselves and nulls map to constants or nulls.
    """

    __slots__ = ("_b", "_hash")

    def __init__(self, bindings: Optional[TMapping] = None):
        b = {}
        for k, v in (bindings or {}).items():
            if k == v:
                continue
            if type(k) is Constant:
                raise ValueError(f"constant {k.name!r} must map to itself")
            if type(k) is Null and type(v) is Variable:
                raise ValueError("nulls map only into constants or nulls")
            b[k] = v
        self._b = b
        self._hash = None

    def __call__(self, t: Term) -> Term:
        return self._b.get(t, t)

    def __getitem__(self, t: Term) -> Term:
        return self._b.get(t, t)

    @property
    def support(self) -> frozenset:
        return frozenset(self._b)

    def items(self):
        return self._b.items()

    def __len__(self) -> int:
        return len(self._b)

    def __bool__(self) -> bool:
        return True

    def __eq__(self, other) -> bool:
        return isinstance(other, Mapping) and self._b == other._b

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._b.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{k!r}->{v!r}" for k, v in sorted(self._b.items(), key=lambda kv: term_key(kv[0]))
        )
        return "Mapping({" + inner + "})"

    @property
    def is_substitution(self) -> bool:
        for k, v in self._b.items():
            if type(k) is Null:
                return False
            if type(v) is Variable:
                return False
        return True

    def apply(self, a: Atom) -> Atom:
        b = self._b
        return Atom(a.predicate, tuple(b.get(t, t) for t in a.args))

    def apply_all(self, atoms: Iterable[Atom]) -> tuple:
        return tuple(self.apply(a) for a in atoms)

    def extend(self, more: TMapping) -> "Mapping":
        d = dict(self._b)
        d.update(more)
        return Mapping(d)

    def as_dict(self) -> dict:
        return dict(self._b)


IDENTITY = Mapping()


def compose(outer: Mapping, inner: Mapping) -> Mapping:
    """``outer ∘ inner``: t ↦ outer(inner(t))."""
    support = set(inner.support) | set(outer.support)
    return Mapping({t: outer(inner(t)) for t in support})


def restrict(m: Mapping, support: Iterable[Term]) -> Mapping:
    return Mapping({t: m(t) for t in support})


# --------------------------------------------------------------------------
# Homomorphisms


def _index(atoms: Iterable[Atom]) -> dict:
    idx: dict = {}
    for a in atoms:
        idx.setdefault((a.predicate, a.arity), []).append(a)
    return idx


def _unify(src: Atom, tgt: Atom, binding: dict) -> Optional[list]:
    """Extend ``binding`` so that src maps onto tgt; return the new keys or None."""
    added = []
    for s, t in zip(src.args, tgt.args):
        ts = type(s)
        if ts is Constant:
            if s != t:
                break
            continue
        cur = binding.get(s)
        if cur is None:
            if ts is Null and type(t) is Variable:
                break
            binding[s] = t
            added.append(s)
        elif cur != t:
            break
    else:
        return added
    for k in added:
        del binding[k]
    return None


def iter_homomorphisms(
    source: Iterable[Atom], target: Iterable[Atom], partial: Optional[TMapping] = None
) -> Iterator[dict]:
    """Yield every binding dict h (over source variables/nulls) with h(source) ⊆ target."""
    src = list(_ordered_unique(source))
    idx = target if isinstance(target, dict) else _index(target)
    cands = [idx.get((a.predicate, a.arity), ()) for a in src]
    if any(not c for c in cands):
        return
    # most constrained atoms first, ties by position for determinism
    order = sorted(range(len(src)), key=lambda i: (len(cands[i]), i))
    binding = dict(partial or {})

    def rec(k):
        if k == len(order):
            yield dict(binding)
            return
        i = order[k]
        for t in cands[i]:
            added = _unify(src[i], t, binding)
            if added is None:
                continue
            yield from rec(k + 1)
            for v in added:
                del binding[v]

    yield from rec(0)


def find_homomorphism(
    source: Iterable[Atom], target: Iterable[Atom], partial: Optional[TMapping] = None
) -> Optional[Mapping]:
    """Some mapping h with h(source) ⊆ target, or None.  Exhaustive backtracking."""
    for h in iter_homomorphisms(source, target, partial):
        return Mapping(h)
    return None


# --------------------------------------------------------------------------
# Canonical forms
#
# Nulls are the only renameable terms.  Colour refinement followed by
# individualisation of the first ambiguous colour class; the lexicographically
# least encoding over all branches is the canonical form.


def _encode_term(t, colour):
    if type(t) is Null:
        return (1, colour[t])
    return term_key(t)


def _refine(atoms: list, colour: dict) -> dict:
    occ: dict = {n: [] for n in colour}
    for a in atoms:
        for i, t in enumerate(a.args):
            if type(t) is Null:
                occ[t].append(a)
    while True:
        sig = {}
        for n, c in colour.items():
            ctx = []
            for a in occ[n]:
                pos = tuple(i for i, t in enumerate(a.args) if t == n)
                ctx.append((a.predicate, pos, tuple(_encode_term(t, colour) for t in a.args)))
            ctx.sort()
            sig[n] = (c, tuple(ctx))
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {n: ranks[sig[n]] for n in colour}
        if len(set(new.values())) == len(set(colour.values())):
            return new
        colour = new


def _encode(atoms: list, colour: dict) -> tuple:
    return tuple(sorted((a.predicate, tuple(_encode_term(t, colour) for t in a.args)) for a in atoms))


def _best_encoding(atoms: list, colour: dict):
    colour = _refine(atoms, colour)
    classes: dict = {}
    for n, c in colour.items():
        classes.setdefault(c, []).append(n)
    ambiguous = [c for c, ns in classes.items() if len(ns) > 1]
    if not ambiguous:
        return _encode(atoms, colour), colour
    c = min(ambiguous)
    best = None
    seen_orbits = set()
    for n in sorted(classes[c], key=term_key):
        trial = {k: (2 * v if k != n else 2 * v - 1) for k, v in colour.items()}
        enc, col = _best_encoding(atoms, trial)
        if enc in seen_orbits:
            continue
        seen_orbits.add(enc)
        if best is None or enc < best[0]:
            best = (enc, col)
    return best


def canonical_labelling(atoms: Iterable[Atom]) -> dict:
    """A map null -> Null(i) sending ``atoms`` to its canonical representative."""
    atoms = list(set(atoms))
    nulls = {t for a in atoms for t in a.args if type(t) is Null}
    if not nulls:
        return {}
    _, colour = _best_encoding(atoms, {n: 0 for n in nulls})
    return {n: Null(c + 1) for n, c in colour.items()}


def canonical_form(atoms: Iterable[Atom]) -> tuple:
    """Sorted atom tuple with nulls renamed canonically.

    Two finite atom sets have equal canonical forms iff they are isomorphic
    (constants and variables are rigid, nulls are renamed bijectively).
    """
    atoms = list(set(atoms))
    lab = canonical_labelling(atoms)
    m = Mapping(lab)
    return tuple(sorted((m.apply(a) for a in atoms), key=atom_key))


def is_isomorphic(s1: Iterable[Atom], s2: Iterable[Atom]) -> bool:
    s1, s2 = set(s1), set(s2)
    if len(s1) != len(s2):
        return False
    if sorted(a.key()[0] for a in s1) != sorted(a.key()[0] for a in s2):
        return False
    return canonical_form(s1) == canonical_form(s2)


def rules_structure(rules: Iterable, offset: Optional[int] = None) -> list[Atom]:
    """Encode a set of ground rules as one atom set.

    Each rule gets a fresh null acting as its node; head and body atoms
    become ``^h:p(node, ...)`` / ``^b:p(node, ...)``.  Two rule sets are
    isomorphic (under one null renaming) iff their encodings are.
    """
    rules = list(rules)
    if offset is None:
        offset = max(
            (t.index for r in rules for a in chain(r.head, r.body) for t in a.nulls()),
            default=0,
        )
    out: set = set()
    keyed = {}
    for r in rules:
        keyed[(frozenset(r.head), frozenset(r.body))] = r
    for i, (h, b) in enumerate(sorted(keyed, key=lambda hb: (sorted(x.key() for x in hb[0]), sorted(x.key() for x in hb[1]))), 1):
        node = Null(offset + i)
        out.add(Atom("^rule", (node,)))
        for a in h:
            out.add(Atom("^h:" + a.predicate, (node,) + a.args))
        for a in b:
            out.add(Atom("^b:" + a.predicate, (node,) + a.args))
    return list(out)


def rules_isomorphic(rs1: Iterable, rs2: Iterable) -> bool:
    """Isomorphism of two sets of ground rules (duplicates collapse)."""
    a = rules_structure(rs1)
    b = rules_structure(rs2)
    return is_isomorphic(a, b)
