from __future__ import annotations

import pytest

from conftest import golden, simplified
from semifree_lab.closure import Budget
from semifree_lab.dsl import parse_term, parse_theory
from semifree_lab.models import count_models
from semifree_lab.proofs import check_proof, proof_from_json
from semifree_lab.semifree import (Equivalent, Inequivalent, SignatureMismatch, Unknown,
                                   expected_equation_count, fresh_name, iterate_semifree,
                                   presentations_equivalent, semifree_theory, simplify_pass1,
                                   verdict_to_json)
from semifree_lab.terms import App, Equation, OpSym, Signature, Theory, Var
from semifree_lab.theories import builtin_theory, identity_theory, monoid_theory

BUILTINS = ["identity", "exception:K=k", "exception:K=k1,k2", "list", "multiset", "finiteset",
            "state:n=2", "writermin:n=2", "idsemifree"]
FAMILIES = ["Idempotency", "FrontAbsorption", "InsideAbsorption", "LiftedAxiom"]


@pytest.mark.parametrize("name", BUILTINS)
def test_generation_count_and_families(name):
    th = builtin_theory(name)
    sf = semifree_theory(th)
    n_pos = sum(1 for s in th.signature if s.arity >= 1)
    assert len(sf.result.equations) == 1 + len(th.signature) + n_pos + len(th.equations)
    assert expected_equation_count(th) == len(sf.result.equations)
    fams = [p.family for p in sf.provenance]
    assert fams == sorted(fams, key=FAMILIES.index)
    assert fams.count("Idempotency") == 1
    assert fams.count("FrontAbsorption") == len(th.signature)
    assert fams.count("InsideAbsorption") == n_pos
    assert fams.count("LiftedAxiom") == len(th.equations)
    assert sf.result.signature.symbols == th.signature.symbols + (sf.a_symbol,)


def test_exception_example():
    sf = semifree_theory(builtin_theory("exception:K=k"))
    sig = sf.result.signature
    assert [(s.name, s.arity) for s in sig] == [("c_k", 0), ("a", 1)]
    assert list(sf.result.equations) == [
        Equation(parse_term("a a v", sig), parse_term("a v", sig)),
        Equation(parse_term("a c_k", sig), parse_term("c_k", sig)),
    ]


def test_identity_example():
    sf = semifree_theory(identity_theory())
    assert [(s.name, s.arity) for s in sf.result.signature] == [("a", 1)]
    assert len(sf.result.equations) == 1


def test_monoid_example():
    sf = semifree_theory(monoid_theory())
    sig = sf.result.signature
    expected = ["a a v = a v", "a e = e", "a(mul(v1, v2)) = mul(v1, v2)",
                "mul(a v1, a v2) = mul(v1, v2)",
                "mul(mul(a u, a v), a w) = mul(a u, mul(a v, a w))",
                "mul(e, a v) = a v", "mul(a v, e) = a v"]
    got = [Equation(parse_term(s.split(" = ")[0], sig), parse_term(s.split(" = ")[1], sig))
           for s in expected]
    assert list(sf.result.equations) == got


def test_fresh_name_policy():
    sig = Signature((OpSym("a", 1), OpSym("a'", 0)))
    assert fresh_name(sig) == "a''"
    assert semifree_theory(Theory("T", sig, ())).a == "a''"


def test_pass1_list_example():
    sf = semifree_theory(monoid_theory())
    th, audit = simplify_pass1(sf)
    sig = th.signature
    assert Equation(parse_term("mul(e, v)", sig), parse_term("a v", sig)) in th.equations
    assert Equation(parse_term("mul(v, e)", sig), parse_term("a v", sig)) in th.equations
    for entry in audit:
        p = proof_from_json(entry["proof_raw_to_new"], sig)
        assert repr(check_proof(sf.result, p)) == entry["to"]


def with_definition(simp, sf):
    """The simplified theory extended by the definitional equation for ``a``."""
    th = simp.theory
    if simp.eliminated is None:
        return th
    a, body = simp.eliminated
    sig = th.signature.extend(sf.a_symbol)
    return Theory(th.name, sig, th.equations + (Equation(App(a, (Var("v"),)), body),))


@pytest.mark.parametrize("name", ["identity", "exception:K=k", "list", "multiset", "finiteset",
                                  "state:n=2", "writermin:n=2"])
def test_simplified_is_equivalent_to_raw(name):
    sf = semifree_theory(builtin_theory(name))
    simp = simplified(name)
    # raw State needs size-12 intermediate terms for one of the pruned equations
    verdict = presentations_equivalent(sf.result, with_definition(simp, sf), Budget(max_size=12))
    assert isinstance(verdict, Equivalent), verdict
    for entry in simp.audit:
        assert entry["pass"] in (1, 2, 3)


@pytest.mark.parametrize("name", ["identity", "exception:K=k", "list", "multiset", "finiteset",
                                  "writermin:n=2", "state:n=2"])
def test_model_counts_preserved(name):
    sf = semifree_theory(builtin_theory(name))
    simp = simplified(name).theory
    for m in (1, 2, 3):
        assert count_models(sf.result, m, cap=None) == count_models(simp, m, cap=None), m


def test_simplified_multiset_and_finiteset_match_hand_sets():
    assert isinstance(presentations_equivalent(simplified("multiset").theory, golden("multiset")),
                      Equivalent)
    fs = golden("finiteset")
    sig = fs.signature
    assert Equation(parse_term("mul(v, v)", sig), parse_term("mul(e, v)", sig)) in fs.equations


def test_iterate_one_is_single_idempotent():
    th = iterate_semifree(identity_theory(), 1)
    assert [str(e) for e in th.equations] == ["a(a(v)) = a(v)"]


def test_equivalence_examples():
    idem = builtin_theory("idsemifree")
    triv = parse_theory("theory T\nop a : 1\neq a v = v\nend\n")
    v = presentations_equivalent(idem, triv, 8)
    assert isinstance(v, Inequivalent)
    assert v.countermodel.size == 2 and v.countermodel.table("a") == (0, 0)
    same = presentations_equivalent(idem, idem)
    assert isinstance(same, Equivalent)
    assert verdict_to_json(same)["verdict"] == "Equivalent"
    with pytest.raises(SignatureMismatch):
        presentations_equivalent(idem, monoid_theory())


def test_unknown_when_budget_too_small():
    v = presentations_equivalent(golden("state2"), simplified("state:n=2").theory,
                                 Budget(max_size=8, max_rounds=1), model_budget=1)
    assert isinstance(v, Unknown) and v.unproved
