import random

import pytest
from hypothesis import given, settings, strategies as st

from slsat.formula import (
    Alloc, Bottom, Eq, HeapGe, HeapGeUnivMinus, Hooks, Not, Top, UnivGe, Wand,
)
from slsat.gen import GenConfig, random_sl, random_structure
from slsat.parser import parse
from slsat.semantics import eval_sl
from slsat.testform import (
    INF, Minterm, NotATestCombination, TestLiteral as Lit, conservative_maxn, desugar_spatial_atoms,
    is_domain_independent, is_minterm, is_test_combination, normalize_for_infinite,
    offending_subformula,
)


def lit(atom, positive=True):
    return Lit(atom, positive)


def test_literals():
    assert lit(HeapGe(INF)).formula() == HeapGe(INF)
    assert lit(Alloc("x"), False).formula() == Not(Alloc("x"))
    with pytest.raises(ValueError):
        lit(UnivGe(INF))
    with pytest.raises(TypeError):
        lit(Wand(Top(), Top()))


def test_minterm_shape():
    good = [lit(HeapGe(1)), lit(HeapGe(3), False), lit(UnivGe(2)), lit(Alloc("x"))]
    assert is_minterm(good)
    m = Minterm.of(good)
    assert m.hmin == 1 and m.hmax == 3
    assert is_minterm(good + [lit(UnivGe(5), False)])
    assert not is_minterm(good[1:])
    assert not is_minterm(good + [lit(HeapGe(2))])
    assert not is_minterm([lit(HeapGe(1)), lit(HeapGe(3), False)])
    with pytest.raises(ValueError):
        Minterm.of(good[:2])
    sym = Minterm.of([lit(HeapGeUnivMinus(1)), lit(HeapGe(INF), False), lit(UnivGe(0))])
    assert sym.hmin.n == 1 and sym.hmax == INF


def test_test_combinations():
    assert is_test_combination(parse("x ~> y & !alloc(z) | |U| >= 2"))
    assert not is_test_combination(parse("x ~> y & !alloc(z) | |U| >= 2"), domain_independent=True)
    assert not is_test_combination(parse("x |-> y"))
    assert offending_subformula(parse("alloc(x) & (emp * true)")) == parse("emp * true")
    assert offending_subformula(parse("|h| >= |U| - 1"), True) == HeapGeUnivMinus(1)
    assert offending_subformula(parse("x = y")) is None


@pytest.mark.parametrize("text, n", [
    ("emp", 2), ("x |-> y", 2), ("|h| >= 3", 4), ("|U| >= 1 | alloc(x)", 2),
    ("!(x = y)", 1), ("emp * x |-> y", 5), ("(emp * emp) -* |h| >= 4", 11),
])
def test_conservative_maxn(text, n):
    assert conservative_maxn(parse(text)) == n


def test_maxn_needs_quantifier_free():
    with pytest.raises(ValueError):
        conservative_maxn(parse("exists x. alloc(x)"))


def test_desugar():
    assert desugar_spatial_atoms(parse("emp")) == Not(HeapGe(1))
    assert desugar_spatial_atoms(parse("x |-> y")) == parse("x ~> y & !|h| >= 2")
    assert desugar_spatial_atoms(parse("forall y. emp")) == parse("forall y. !|h| >= 1")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_desugar_preserves_meaning(seed):
    rng = random.Random(seed)
    phi = random_sl(rng, ["x", "y"], rng.randint(1, 8), GenConfig(max_const=2))
    i = random_structure(rng, rng.randint(1, 3), ["x", "y"])
    assert eval_sl(i, desugar_spatial_atoms(phi)) == eval_sl(i, phi)


def test_normalize_for_infinite():
    phi = parse("|U| >= 3 & !|h| >= |U| - 1 | alloc(x)")
    assert normalize_for_infinite(phi) == parse("true & !false | alloc(x)")
    with pytest.raises(NotATestCombination):
        normalize_for_infinite(parse("emp"))


def test_domain_independence():
    assert is_domain_independent(parse("x ~> y & emp * true"))
    assert not is_domain_independent(parse("|U| >= 1"))
    assert not is_domain_independent(parse("alloc(x) -* true"))
    assert is_domain_independent(Eq("x", "y")) and is_domain_independent(Hooks("x", "y"))
    assert is_domain_independent(Bottom())
