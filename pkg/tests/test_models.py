from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_models
from semifree_lab.csp import FeasibilityError, Need, solve
from semifree_lab.dsl import parse_term, parse_theory
from semifree_lab.models import (FiniteAlgebra, count_models, enumerate_models, is_model,
                                 satisfies)
from semifree_lab.semifree import semifree_theory
from semifree_lab.terms import Equation, Signature, Theory
from semifree_lab.theories import builtin_theory

IDEM = builtin_theory("idsemifree")
A = IDEM.signature


def unary(table):
    return FiniteAlgebra(2, A, (tuple(table),))


def test_satisfies_examples():
    eq = IDEM.equations[0]
    assert satisfies(unary([0, 0]), eq)
    assert not satisfies(unary([1, 0]), eq)


def test_max_monoid_satisfies_multiset_semifree():
    sf = semifree_theory(builtin_theory("multiset"))
    sig = sf.result.signature
    alg = FiniteAlgebra.from_functions(2, sig, {"e": lambda: 0, "mul": max, "a": lambda v: v})
    assert is_model(alg, sf.result)
    simplified = parse_theory(open("golden/multiset.theory").read())
    alg2 = FiniteAlgebra.from_functions(2, simplified.signature, {"e": lambda: 0, "mul": max})
    assert is_model(alg2, simplified)


def test_enumerate_examples():
    models = enumerate_models(IDEM, 2)
    assert len(models) == 3
    assert {m.tables[0] for m in models} == {(0, 1), (0, 0), (1, 1)}
    exc = semifree_theory(builtin_theory("exception:K=k")).result
    assert count_models(exc, 2) == 4
    empty = parse_theory("theory Empty\nend\n")
    assert [count_models(empty, m) for m in (1, 2, 3)] == [1, 1, 1]


def test_models_are_in_canonical_order():
    models = enumerate_models(builtin_theory("writermin:n=2"), 3)
    assert [m.tables for m in models] == sorted(m.tables for m in models)


def test_cap_refusal_reports_size():
    th = builtin_theory("list")
    with pytest.raises(FeasibilityError) as info:
        enumerate_models(th, 3, cap=1000)
    assert info.value.space == 3 ** (1 + 9)


CROSS = ["idsemifree", "exception:K=k1,k2", "writermin:n=2", "list", "multiset", "finiteset",
         "state:n=2"]


@pytest.mark.parametrize("name", CROSS)
def test_csp_matches_naive_enumeration(name):
    th = builtin_theory(name)
    for variant in (th, semifree_theory(th).result):
        for m in (1, 2):
            fast = [a.tables for a in enumerate_models(variant, m)]
            slow = [a.tables for a in brute_models(variant, m)]
            assert fast == slow, (variant.name, m)


def test_csp_matches_naive_on_carrier_three():
    for name in ("idsemifree", "writermin:n=2", "exception:K=k"):
        th = semifree_theory(builtin_theory(name)).result
        assert [a.tables for a in enumerate_models(th, 3)] == \
            [a.tables for a in brute_models(th, 3)]


def test_raw_solver_all_different():
    # three cells over {0,1,2}, pairwise distinct: the 6 permutations
    def diff(i, j):
        def c(vals):
            if vals[i] is None or vals[j] is None:
                raise Need(i if vals[i] is None else j)
            return vals[i] != vals[j]
        return c
    sols = solve(3, 3, [diff(0, 1), diff(1, 2), diff(0, 2)])
    assert sorted(sols) == [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


# random small theories over {a:1, b:1, c:0} with up to two equations
SIG = Signature.of(("a", 1), ("b", 1), ("c", 0))
TERMS = ["x", "y", "c", "a x", "b x", "a y", "a a x", "a b x", "b a y", "a c", "b c"]
eq_st = st.tuples(st.sampled_from(TERMS), st.sampled_from(TERMS))


@settings(max_examples=60, deadline=None)
@given(st.lists(eq_st, max_size=2))
def test_csp_matches_naive_on_random_theories(pairs):
    eqs = tuple(Equation(parse_term(s, SIG), parse_term(t, SIG)) for s, t in pairs)
    th = Theory("R", SIG, eqs)
    assert [a.tables for a in enumerate_models(th, 2)] == [a.tables for a in brute_models(th, 2)]
