from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_models, holds
from semifree_lab.closure import Budget, prove_bounded
from semifree_lab.dsl import parse_term
from semifree_lab.models import find_countermodel, is_model
from semifree_lab.proofs import (Axiom, Cong, ProofError, Refl, Symm, Trans, axiom_instance,
                                 check_proof, generate_proofs, proof_from_json, proof_to_json,
                                 subst, uses_substitution)
from semifree_lab.semifree import (PreconditionError, lift_proof, proof_a_front, proof_a_inside,
                                   semifree_theory)
from semifree_lab.terms import Equation, Var, apply_substitution
from semifree_lab.theories import builtin_theory, monoid_theory

MON = monoid_theory()
SIG = MON.signature


def T(text, sig=SIG):
    return parse_term(text, sig)


def test_axiom_leaf():
    j = check_proof(MON, Axiom(0))
    assert (j.lhs, j.rhs) == (T("mul(mul(u, v), w)"), T("mul(u, mul(v, w))"))


def unit_chain():
    # e.(e.x) = e.x = x, both steps by the left unit law
    step1 = Cong("mul", (Refl(T("e")), axiom_instance(1, {"v": T("x")})))
    step2 = axiom_instance(1, {"v": T("x")})
    return Trans(step1, step2)


def test_two_step_unit_proof():
    j = check_proof(MON, unit_chain())
    assert (j.lhs, j.rhs) == (T("mul(e, mul(e, x))"), T("x"))


def test_transitivity_mismatch_names_both_terms():
    bad = Trans(axiom_instance(1, {"v": T("x")}), axiom_instance(1, {"v": T("y")}))
    with pytest.raises(ProofError) as info:
        check_proof(MON, bad)
    assert "x" in str(info.value) and "mul(e, y)" in str(info.value)


def test_axiom_out_of_range_and_arity():
    with pytest.raises(ProofError):
        check_proof(MON, Axiom(7))
    with pytest.raises(ProofError):
        check_proof(MON, Cong("mul", (Refl(T("x")),)))


def test_proof_json_round_trip():
    p = Symm(unit_chain())
    assert proof_from_json(proof_to_json(p), SIG) == p


def test_prove_bounded_examples():
    proof, _ = prove_bounded(MON, T("mul(e, mul(e, x))"), T("x"))
    assert proof is not None
    j = check_proof(MON, proof)
    assert (j.lhs, j.rhs) == (T("mul(e, mul(e, x))"), T("x"))

    sf = semifree_theory(MON)
    s = parse_term("a(mul(a(x), e))", sf.result.signature)
    t = parse_term("a(x)", sf.result.signature)
    proof, _ = prove_bounded(sf.result, s, t)
    assert proof is not None
    assert check_proof(sf.result, proof).rhs == t

    proof, stats = prove_bounded(MON, T("mul(x, y)"), T("mul(y, x)"), Budget(max_size=6))
    assert proof is None and (stats.saturated or stats.exhausted is not None)


def test_countermodel_examples():
    sf = semifree_theory(MON).result
    found = find_countermodel(sf, T("a(x)", sf.signature), T("x"), 2)
    assert found is not None
    alg, env = found
    assert alg.size == 2 and env == {"x": 1}
    assert alg.table("a") == (0, 0) and alg.table("e") == (0,) and alg.table("mul") == (0,) * 4
    assert is_model(alg, sf)

    found = find_countermodel(MON, T("mul(x, y)"), T("mul(y, x)"), 3)
    assert found is not None
    alg, env = found
    assert is_model(alg, MON) and not holds(alg, T("mul(x, y)"), T("mul(y, x)"))
    assert find_countermodel(MON, T("x"), T("x"), 3) is None


def test_a_front_and_inside():
    sf = semifree_theory(MON)
    S = sf.result.signature
    assert proof_a_front(sf, T("e")) == Axiom(sf.index("FrontAbsorption", "e"))
    assert check_proof(sf.result, proof_a_front(sf, T("mul(u, v)"))).lhs == T("a(mul(u, v))", S)
    j = check_proof(sf.result, proof_a_front(sf, T("mul(mul(u, v), w)")))
    assert (j.lhs, j.rhs) == (T("a(mul(mul(u, v), w))", S), T("mul(mul(u, v), w)"))

    assert check_proof(sf.result, proof_a_inside(sf, T("mul(u, v)"))).lhs == T("mul(a u, a v)", S)
    j = check_proof(sf.result, proof_a_inside(sf, T("mul(u, mul(v, w))")))
    assert (j.lhs, j.rhs) == (T("mul(a u, mul(a v, a w))", S), T("mul(u, mul(v, w))"))
    assert proof_a_inside(sf, T("e")) == Refl(T("e"))
    with pytest.raises(PreconditionError):
        proof_a_front(sf, T("x"))
    with pytest.raises(PreconditionError):
        proof_a_inside(sf, T("x"))


def test_lift_examples():
    sf = semifree_theory(MON)
    assert lift_proof(sf, Axiom(2)) == Axiom(sf.index("LiftedAxiom", index=2))
    assert lift_proof(sf, Refl(T("mul(x, e)"))) == Refl(sf.wrap(T("mul(x, e)")))
    j = check_proof(sf.result, lift_proof(sf, unit_chain()))
    assert (j.lhs, j.rhs) == (T("mul(e, mul(e, a x))", sf.result.signature), T("a x", sf.result.signature))


def test_lift_variable_equation():
    # a theory with a bare-variable axiom exercises the variable cases
    th = builtin_theory("identity").with_equations([Equation(Var("x"), Var("y"))])
    sf = semifree_theory(th)
    p = subst(Axiom(0), {"x": Var("z"), "y": Var("z")})
    j = check_proof(sf.result, lift_proof(sf, p))
    assert (j.lhs, j.rhs) == (T("a z", sf.result.signature), T("a z", sf.result.signature))


@pytest.mark.parametrize("name", ["identity", "exception:K=k", "list", "multiset", "finiteset",
                                  "state:n=2", "writermin:n=2"])
def test_lift_corpus(name):
    th = builtin_theory(name)
    sf = semifree_theory(th)
    corpus = generate_proofs(th, 20, seed=7)
    assert sum(uses_substitution(p) for p in corpus) >= 5
    for p in corpus:
        j = check_proof(th, p)
        lj = check_proof(sf.result, lift_proof(sf, p))
        assert (lj.lhs, lj.rhs) == (sf.wrap(j.lhs), sf.wrap(j.rhs))


SMALL_THEORIES = ["idsemifree", "exception:K=k", "writermin:n=2", "finiteset"]
MODELS = {name: {m: brute_models(builtin_theory(name), m) for m in (1, 2)}
          for name in SMALL_THEORIES}


@pytest.mark.parametrize("name", SMALL_THEORIES)
def test_checker_sound_against_naive_models(name):
    th = builtin_theory(name)
    for p in generate_proofs(th, 15, seed=3):
        j = check_proof(th, p)
        for m, algs in MODELS[name].items():
            for alg in algs:
                assert holds(alg, j.lhs, j.rhs), (p, alg)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(SMALL_THEORIES))
def test_generated_proofs_are_sound(seed, name):
    th = builtin_theory(name)
    p = generate_proofs(th, 1, seed=seed, min_substitutions=0)[0]
    j = check_proof(th, p)
    for alg in MODELS[name][2]:
        assert holds(alg, j.lhs, j.rhs)


def test_prove_and_refute_never_collide():
    th = builtin_theory("multiset")
    queries = [("mul(x, y)", "mul(y, x)"), ("mul(x, x)", "x"), ("mul(e, x)", "x"),
               ("mul(x, mul(y, z))", "mul(z, mul(y, x))")]
    for s, t in queries:
        s_, t_ = T(s), T(t)
        proof, _ = prove_bounded(th, s_, t_)
        cm = find_countermodel(th, s_, t_, 2)
        assert not (proof is not None and cm is not None)
        if proof is not None:
            j = check_proof(th, proof)
            assert (j.lhs, j.rhs) == (s_, t_)
    assert apply_substitution(T("x"), {}) == Var("x")
