import pytest
from hypothesis import assume, given, settings, strategies as st

from gen import Shape, random_database, random_program_text, random_query, rng_for
from disjex.classify import affected_positions, classify, weak_guard
from disjex.core import Constant, Variable
from disjex.ground import Budget, instantiate
from disjex.models import entails
from disjex.parser import parse_database, parse_program, parse_query, print_program
from disjex.transform import (
    EDB,
    EmptyConstantDomain,
    NotGuarded,
    NotWeaklyGuarded,
    cq_to_bcq_instances,
    edb_rewrite,
    format_formula,
    is_guarded_formula,
    to_guarded_fol,
    winst,
)


def test_edb_rewrite_disjunctive_fact():
    p, d = edb_rewrite(parse_program("a(c) v b(c)."), ())
    assert print_program(p) == "a(c) v b(c) :- edb.\n"
    assert d == (EDB,)


def test_edb_rewrite_noop_without_body_free_rules():
    p = parse_program("q(X) :- p(X).")
    d = parse_database("p(a).")
    assert edb_rewrite(p, d) == (p, d)


def test_edb_rewrite_existential_fact():
    p, d = edb_rewrite(parse_program("exists Y: q(Y)."), parse_database("r(a)."))
    assert [v.name for v in p.rules[0].exist_vars] == ["Y"]
    assert print_program(p) == "q(Y) :- edb.\n"
    assert d[-1] == EDB and len(d) == 2


def test_winst_grounds_unguarded_variables():
    p = parse_program("q(X) :- s(X), t(Z).\ns(a). t(b).")
    assert print_program(winst(p)).splitlines()[:2] == ["q(X) :- s(X), t(a).", "q(X) :- s(X), t(b)."]


def test_winst_leaves_guarded_programs_alone():
    p = parse_program("c(X) v h(X) :- a(X).\np(X,Y) :- c(X).\na(Y) :- p(X,Y).\nc(lion).")
    assert print_program(winst(p)) == print_program(p)
    facts = parse_program("a(b). exists Y: r(Y).")
    assert print_program(winst(facts)) == print_program(facts)


def test_winst_errors():
    with pytest.raises(NotWeaklyGuarded):
        winst(parse_program("q(Y) :- p(X).\nr(X,Y) :- q(X), q(Y)."))
    with pytest.raises(EmptyConstantDomain):
        winst(parse_program("q(X) :- s(X), t(Z)."))


def test_fol_examples():
    fol = lambda t: [format_formula(f) for f in to_guarded_fol(parse_program(t))]  # noqa: E731
    assert fol("c(X) v h(X) :- a(X).") == ["forall X. (c(X) | h(X) <- a(X))"]
    assert fol("p(X,Y) :- c(X).") == ["forall X. (exists Y. p(X,Y) <- c(X))"]
    assert fol("q(X) :- g(X,Z), s(Z).") == ["forall X,Z. (q(X) | ~s(Z) <- g(X,Z))"]


def test_fol_rejects_unguarded():
    with pytest.raises(NotGuarded):
        to_guarded_fol(parse_program("q(X) :- s(X), t(Z)."))


def test_cq_instances():
    inst = list(cq_to_bcq_instances(parse_query("?(X) :- c(X)."), parse_program("c(lion).")))
    assert len(inst) == 1
    s, b = inst[0]
    assert s.as_dict() == {Variable("X"): Constant("lion")}
    assert b == parse_query("?- c(lion).")
    q = parse_query("?- c(X).")
    assert [b for _, b in cq_to_bcq_instances(q, parse_program("c(a)."))] == [q]
    inst = list(cq_to_bcq_instances(parse_query("?(X,Y) :- r(X,Y)."), parse_program("r(a,b). r(c,c).")))
    pairs = [tuple(t.name for t in b.atoms[0].args) for _, b in inst]
    assert pairs == sorted(pairs) and len(pairs) == 9


def test_cq_instances_use_database_constants():
    inst = list(cq_to_bcq_instances(parse_query("?(X) :- r(X)."), parse_program("r(X) :- s(X)."),
                                    parse_database("s(d). s(e).")))
    assert [b.atoms[0].args[0].name for _, b in inst] == ["d", "e"]


def _weakly_guarded(seed):
    rng = rng_for("winst", seed)
    text, sig = random_program_text(rng, Shape(preds=3, rules=4, body=(1, 3), p_const=0.25, consts=("a", "b")))
    db = random_database(rng, sig, n=(1, 3), consts=("a", "b", "c"))
    p = parse_program(text).with_facts(parse_database(" ".join(x + "." for x in db)))
    return p, sig, rng


@settings(max_examples=80)
@given(st.integers(0, 100_000))
def test_winst_output_is_guarded_and_bounded(seed):
    p, _, _ = _weakly_guarded(seed)
    rep = classify(p)
    assume(rep.is_weakly_guarded)
    w = winst(p)
    assert classify(w).is_guarded
    aff = affected_positions(p)
    k = 0
    for r in p.rules:
        if r.body:
            g = weak_guard(r, aff)
            k = max(k, sum(v not in set(g.variables()) for v in r.universal_vars))
    assert len(w.rules) <= len(p.rules) * max(1, len(p.constants())) ** k


@settings(max_examples=80)
@given(st.integers(0, 100_000))
def test_fol_formulas_are_guarded(seed):
    p, _, _ = _weakly_guarded(seed)
    assume(classify(p).is_guarded)
    assert all(is_guarded_formula(f) for f in to_guarded_fol(p))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_edb_rewrite_preserves_answers(seed):
    rng = rng_for("edb", seed)
    text, sig = random_program_text(rng, Shape(preds=3, rules=3, p_const=0.3, consts=("a", "b")))
    db = random_database(rng, sig, n=(1, 2), consts=("a", "b"))
    disj = " v ".join(random_database(rng, sig, n=(2, 2), consts=("a", "b")))
    p = parse_program(text + "\n" + " ".join(x + "." for x in db) + "\n" + disj + ".")
    q = random_query(rng, sig, atoms=(1, 1), consts=("a", "b"))
    before = instantiate(p, Budget(5, 2000))
    p2, d2 = edb_rewrite(p, ())
    after = instantiate(p2.with_facts(d2), Budget(6, 2000))
    assume(before.complete and after.complete)
    assert entails(before, q).entailed == entails(after, q).entailed
