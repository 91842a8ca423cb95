import pytest
from hypothesis import given, settings, strategies as st

from gen import Shape, random_database, random_program_text, random_query, rng_for
from disjex.core import canonical_form, rules_isomorphic
from disjex.ground import Budget, instantiate
from disjex.linear import (
    NotAtomic,
    NotLinear,
    atomic_qa_linear,
    build_stem,
    build_tree,
    depth_bound,
    stem_qa,
    subtree_structure,
)
from disjex.models import entails
from disjex.parser import format_rule, parse_atom, parse_database, parse_program, parse_query

CYCLE = "exists Y: a(Y) :- d(X).\nb(X) v c(X) :- a(X).\nd(X) :- b(X).\nd(X) :- c(X).\ne(X) :- d(X).\n"


def labels(nodes):
    return [format_rule(n.label.head, n.label.body) for n in nodes]


def test_tree_root_and_children():
    t = build_tree(parse_program(CYCLE), parse_atom("d(0)"), 3)
    assert labels([t.root]) == ["d(0)."]
    assert labels(t.children(t.root.id)) == ["a(_n1) :- d(0).", "e(0) :- d(0)."]
    assert t.max_depth() == 3


def test_tree_trivial_cases():
    assert len(build_tree(parse_program("q(b)."), parse_atom("d(0)"), 5).nodes) == 1
    assert len(build_tree(parse_program(CYCLE), parse_atom("d(0)"), 0).nodes) == 1


def test_tree_bodies_sit_in_parent_heads():
    t = build_tree(parse_program(CYCLE), parse_atom("d(0)"), 6)
    for n in t.nodes[1:]:
        parent = t.nodes[n.parent]
        assert set(n.label.body) <= set(parent.label.head)
        assert n.depth == parent.depth + 1


def test_cycle_stem():
    s = build_stem(parse_program(CYCLE), parse_atom("d(0)"))
    assert s.tree.dump().splitlines() == [
        "d(0).",
        "  a(_n1) :- d(0).",
        "    b(_n1) v c(_n1) :- a(_n1).",
        "      d(_n1) :- b(_n1).",
        "        a(_n2) :- d(_n1).",
        "          %% stem-pruned b(_n2) v c(_n2) :- a(_n2).",
        "        e(_n1) :- d(_n1).",
        "      d(_n1) :- c(_n1).",
        "        a(_n2) :- d(_n1).",
        "          %% stem-pruned b(_n2) v c(_n2) :- a(_n2).",
        "        e(_n1) :- d(_n1).",
        "  e(0) :- d(0).",
    ]


def test_non_recursive_stem_is_the_tree():
    p = parse_program("q(X,Y) :- p(X).\nr(Y) :- q(X,Y).")
    a = parse_atom("p(a)")
    assert build_stem(p, a).tree.dump() == build_tree(p, a, 10).dump()


def test_self_loop_stem():
    s = build_stem(parse_program("p(X) :- p(X)."), parse_atom("p(0)"))
    assert len(s.tree.nodes) == 2 and len(s.tree.pruned) == 1


def test_cycle_queries():
    p, d = parse_program(CYCLE), parse_database("d(0).")
    assert atomic_qa_linear(p, d, parse_query("?- e(X)."))
    assert not atomic_qa_linear(p, d, parse_query("?- b(X)."))
    assert not atomic_qa_linear(p, (), parse_query("?- e(X)."))


def test_errors():
    with pytest.raises(NotLinear):
        build_stem(parse_program("w :- s(X), t(X)."), parse_atom("s(a)"))
    with pytest.raises(NotAtomic):
        stem_qa(parse_program(CYCLE), parse_database("d(0)."), parse_query("?- a(X), e(X)."))


def test_stem_can_reach_the_depth_bound():
    # one predicate of arity one gives the bound 2, and the stem reaches depth 2:
    # p0(_n1) is not isomorphic to p0(a), only p0(_n2) repeats p0(_n1)
    p = parse_program("exists E: p0(E) :- p0(Y).")
    s = build_stem(p, parse_atom("p0(a)"))
    assert depth_bound(p) == 2
    assert s.tree.max_depth() == 2


# ---------------------------------------------------------------- properties

def _linear(seed, preds=3):
    rng = rng_for("linear", seed)
    text, sig = random_program_text(rng, Shape(preds=preds, rules=4, body=(1, 1), head=(1, 2), p_exist=0.3))
    return parse_program(text), sig, rng


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_stem_paths_and_depth(seed):
    p, sig, rng = _linear(seed)
    for a in random_database(rng, sig, n=(1, 2)):
        s = build_stem(p, parse_atom(a))
        t = s.tree
        assert t.max_depth() <= depth_bound(p)
        for n in t.nodes:
            bodies = [canonical_form(m.label.body) for m in t.path(n.id) if m.label.body]
            assert len(bodies) == len(set(bodies))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_sinst_independent_of_other_database_atoms(seed):
    p, sig, rng = _linear(seed)
    db = random_database(rng, sig, n=(2, 3))
    a = parse_atom(db[0])
    s1 = build_stem(p, a).sinst
    s2 = build_stem(p.with_facts(parse_database(" ".join(x + "." for x in db[1:]))), a).sinst
    assert len(s1) == len(s2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_sibling_cover(seed):
    p, sig, rng = _linear(seed, preds=2)
    a = parse_atom(random_database(rng, sig, n=(1, 1))[0])
    full = 4
    t = build_tree(p, a, full)
    if len(t.nodes) > 150:
        return
    seen: dict = {}
    for n in sorted(t.nodes, key=lambda n: (n.depth, n.id)):
        if not n.label.body:
            continue
        key = canonical_form(n.label.body)
        if key not in seen:
            seen[key] = n
            continue
        m = seen[key]
        rest = full - n.depth
        mine = subtree_structure(t, n.id, rest)
        candidates = [m.id] + [c.id for c in t.children(m.parent) if c.id != m.id]
        assert any(rules_isomorphic(subtree_structure(t, c, rest), mine) for c in candidates)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_decomposition_matches_ground_engine(seed):
    p, sig, rng = _linear(seed)
    d = parse_database(" ".join(x + "." for x in random_database(rng, sig, n=(1, 3))))
    q = random_query(rng, sig, atoms=(1, 1))
    g = instantiate(p.with_facts(d), Budget(depth_bound(p) + 1, 3000))
    if not g.complete and len(g.rules) >= 3000:
        return
    assert atomic_qa_linear(p, d, q) == entails(g, q).entailed
