import random

import pytest
from hypothesis import given, settings, strategies as st

from slsat.formula import (
    App, Emp, Exists, Forall, HeapGeUnivMinus, Implies, PointsTo, TermEq, Var, Wand,
)
from slsat.gen import GenConfig, random_bsr, random_fo, random_sl
from slsat.parser import ParseError, parse, to_text


def test_atoms_and_binders():
    assert parse("emp") == Emp()
    assert parse("exists x. forall y. x |-> y") == Exists("x", Forall("y", PointsTo("x", "y")))
    phi = parse("forall y. forall z. (f(y) = f(z)) -> y = z", "FO")
    assert phi == Forall("y", Forall("z", Implies(
        TermEq(App(Var("y")), App(Var("z"))), TermEq(Var("y"), Var("z")))))


def test_printing():
    assert to_text(Emp()) == "emp"
    assert to_text(PointsTo("x", "y")) == "x |-> y"
    assert to_text(HeapGeUnivMinus(2)) == "|h| >= |U| - 2"


def test_precedence():
    assert parse("a = b | c = d & emp") == parse("a = b | (c = d & emp)")
    assert parse("emp * emp -* emp") == parse("emp * (emp -* emp)")
    assert parse("emp -* emp -* emp") == Wand(Emp(), Wand(Emp(), Emp()))
    assert parse("emp -> emp -> emp") == Implies(Emp(), Implies(Emp(), Emp()))
    assert parse("emp & exists x. alloc(x) | emp") == parse("emp & (exists x. (alloc(x) | emp))")


def test_unicode_input():
    assert parse("∃x. ∀y. x ↦ y ∗ ¬emp") == parse("exists x. forall y. x |-> y * !emp")
    assert parse("x ≉ y") == parse("!(x = y)")


def test_comments_are_ignored():
    assert parse("# a comment\nemp # trailing\n") == Emp()


@pytest.mark.parametrize("text", ["emp &", "alloc(x", "x |-> ", "|h| >= -1", "exists . emp", "emp )"])
def test_syntax_errors_carry_position(text):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.line == 1 and err.value.col >= 1


def test_fo_arity_and_dialect_errors():
    with pytest.raises(ParseError):
        parse("f(x, y) = z", "FO")
    with pytest.raises(ParseError):
        parse("g(x) = z", "FO")
    with pytest.raises(ParseError):
        parse("emp", "FO")
    with pytest.raises(ParseError):
        parse("x ~> y * emp", "FO")


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_round_trip_sl(seed):
    rng = random.Random(seed)
    phi = random_bsr(rng, GenConfig(max_nodes=14)) if seed % 2 else random_sl(rng, ["x", "y"], 12, GenConfig())
    assert parse(to_text(phi)) == phi


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_round_trip_fo(seed):
    rng = random.Random(seed)
    phi = random_fo(rng, ["x", "y"], 8, preds=["P", "d"])
    if seed % 3 == 0:
        phi = Exists("x", Forall("y", phi))
    assert parse(to_text(phi), "FO") == phi
