from __future__ import annotations

import json

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semifree_lab.dsl import (REPORT_SCHEMA, ParseError, dumps, parse_equation, parse_term,
                              parse_theory, print_theory, report, theory_from_json,
                              theory_to_json)
from semifree_lab.semifree import semifree_theory
from semifree_lab.terms import App, Var
from semifree_lab.theories import builtin_theory, exception_theory, state_theory

BUILTINS = ["identity", "exception:K=k1,k2", "list", "multiset", "finiteset", "state:n=2",
            "writermin:n=3", "idsemifree"]

MONOID_SRC = """
# monoids
theory Monoid
op e : 0
op mul : 2
eq mul(mul(u, v), w) = mul(u, mul(v, w))
eq mul(e, v) = v   # left unit
eq mul(v, e) = v
end
"""


def test_parse_monoid():
    th = parse_theory(MONOID_SRC)
    assert [(s.name, s.arity) for s in th.signature] == [("e", 0), ("mul", 2)]
    assert len(th.equations) == 3


def test_arity_error_has_span():
    with pytest.raises(ParseError) as info:
        parse_theory("theory T\nop mul : 2\neq mul(x) = x\nend\n", "t.theory")
    assert info.value.span.file == "t.theory"
    assert info.value.span.line == 3
    assert info.value.span.column >= 1
    assert "arity" in info.value.message


def test_empty_theory():
    th = parse_theory("theory Id\nend\n")
    assert len(th.signature) == 0 and th.equations == ()


def test_crlf_tolerated():
    th = parse_theory(MONOID_SRC.replace("\n", "\r\n"))
    assert len(th.equations) == 3


def test_print_exception_theory():
    text = print_theory(exception_theory(["k1", "k2"]))
    assert text.index("op c_k1 : 0") < text.index("op c_k2 : 0")


@pytest.mark.parametrize("name", BUILTINS)
def test_round_trip_builtin_and_semifree(name):
    th = builtin_theory(name)
    assert parse_theory(print_theory(th)) == th
    sf = semifree_theory(th).result
    assert parse_theory(print_theory(sf)) == sf
    assert theory_from_json(theory_to_json(sf)) == sf


def test_parse_term_examples():
    sig = builtin_theory("list").signature
    assert parse_term("mul(x, e)", sig) == App("mul", (Var("x"), App("e")))
    asig = builtin_theory("idsemifree").signature
    assert parse_term("a a v", asig) == App("a", (App("a", (Var("v"),)),))
    ssig = state_theory(2).signature
    assert parse_term("f(g1(x), g2(y))", ssig) == \
        App("f", (App("g1", (Var("x"),)), App("g2", (Var("y"),))))


@pytest.mark.parametrize("text", ["inv(x)", "mul(x)", "mul(x, y", "mul(x,, y)", "@"])
def test_parse_term_errors(text):
    with pytest.raises(ParseError) as info:
        parse_term(text, builtin_theory("list").signature)
    assert info.value.span.line >= 1 and info.value.span.column >= 1


def test_parse_equation():
    eq = parse_equation("mul(e, v) = v", builtin_theory("list").signature)
    assert eq.rhs == Var("v")


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="theoryopeqnd :=()#,\nxymul0123a", max_size=80))
def test_parser_never_crashes(text):
    try:
        parse_theory(text)
    except ParseError as exc:
        assert exc.span.line >= 1 and exc.span.column >= 1


def test_report_schema():
    doc = report("models", "Monoid", [{"count": 3}], {"carrier": 2})
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["format"] == "semifree-lab/1"
    assert json.loads(dumps(doc)) == doc
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(dict(doc, extra=1), REPORT_SCHEMA)
