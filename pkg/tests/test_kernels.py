import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import ground_models, minimal_sets
from disjex import kernels
from disjex.exhaustive import exhaustive_entails, exhaustive_models, ground_over_terms
from disjex.parser import parse_atom, parse_program, parse_query


def _flags_by_brute_force(n, body, head):
    return np.array([all(not (m & b == b and m & h == 0) for b, h in zip(body, head)) for m in range(1 << n)])


clause_sets = st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1)), max_size=8),
))


@settings(max_examples=100)
@given(clause_sets)
def test_numpy_kernel_matches_brute_force(case):
    n, cl = case
    body = np.array([b for b, _ in cl], dtype=np.uint64)
    head = np.array([h for _, h in cl], dtype=np.uint64)
    flags = kernels.model_flags_numpy(n, body, head)
    assert (flags == _flags_by_brute_force(n, [b for b, _ in cl], [h for _, h in cl])).all()
    mins = kernels.minimal_flags_numpy(flags)
    members = [m for m in range(1 << n) if flags[m]]
    expected = {m for m in members if not any(s != m and s & m == s for s in members)}
    assert set(kernels.masks_to_sets(mins)) == expected


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")
@settings(max_examples=100, deadline=None)  # first call includes jit compilation
@given(clause_sets)
def test_numba_kernel_matches_numpy(case):
    n, cl = case
    body = np.array([b for b, _ in cl], dtype=np.uint64)
    head = np.array([h for _, h in cl], dtype=np.uint64)
    a = kernels.model_flags_numba(n, body, head)
    b = kernels.model_flags_numpy(n, body, head)
    assert (a == b).all()
    assert (kernels.minimal_flags_numba(a) == kernels.minimal_flags_numpy(b)).all()


def test_atom_limit():
    with pytest.raises(ValueError):
        kernels.model_flags_numpy(kernels.MAX_ATOMS + 1, np.zeros(0, np.uint64), np.zeros(0, np.uint64))


def test_env_flag_selects_numpy():
    code = "from disjex import kernels as k; print(k.HAVE_NUMBA, k.model_flags is k.model_flags_numpy)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env=dict(os.environ, DISJEX_NO_NUMBA="1"), check=True).stdout.split()
    assert out == ["False", "True"]


def test_existential_grounds_to_disjunction():
    p = parse_program("q(X,Y) :- p(X).")
    terms = [parse_atom("t(a)").args[0], parse_atom("t(b)").args[0]]
    cl = ground_over_terms(p, terms)
    assert len(cl) == 2
    assert {len(c.head) for c in cl} == {2}


def test_exhaustive_matches_subset_oracle():
    p = parse_program("a(x) v b(x) :- e(x).\nc(x) :- a(x).\nc(x) :- b(x).\ne(x).")
    terms = [parse_atom("t(x)").args[0]]
    ours = set(exhaustive_models(p, terms))
    clauses = [(c.head, c.body) for c in ground_over_terms(p, terms)]
    assert ours == set(minimal_sets(ground_models(clauses)))
    assert exhaustive_entails(p, terms, parse_query("?- c(x)."))
    assert not exhaustive_entails(p, terms, parse_query("?- a(x)."))
