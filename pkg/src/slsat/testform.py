"""Test formulae, literals and minterms.

Test atoms are ``x = y``, ``x ~> y``, ``alloc(x)``, ``|h| >= n``,
``|U| >= n`` and ``|h| >= |U| - n``.  The last two are domain dependent:
their truth depends on the size of the universe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

from .formula import (
    Alloc, And, Bottom, Emp, Eq, Formula, HeapGe, HeapGeUnivMinus, Hooks, Iff,
    Implies, Not, Or, PointsTo, Star, TEST_ATOMS, Top, UnivGe, Wand,
    is_quantifier_free, subformulas,
)

INF = math.inf


class NotATestCombination(ValueError):
    pass


@dataclass(frozen=True)
class TestLiteral:
    """A test atom with a polarity.  ``HeapGe`` may carry ``INF``."""

    atom: Formula
    positive: bool = True

    def __post_init__(self):
        if not isinstance(self.atom, TEST_ATOMS):
            raise TypeError(f"not a test atom: {self.atom!r}")
        n = getattr(self.atom, "n", 0)
        if n == INF and not isinstance(self.atom, HeapGe):
            raise ValueError("only |h| >= n accepts an infinite bound")

    def formula(self) -> Formula:
        return self.atom if self.positive else Not(self.atom)


@dataclass(frozen=True)
class UnivMinus:
    """The symbolic bound |U| - n."""

    n: int


Bound = Union[int, float, UnivMinus]


@dataclass(frozen=True)
class Minterm:
    literals: frozenset[TestLiteral]
    hmin: Bound
    hmax: Bound

    @classmethod
    def of(cls, literals: Iterable[TestLiteral]) -> "Minterm":
        lits = frozenset(literals)
        shape = _cardinality_shape(lits)
        if shape is None:
            raise ValueError("literals do not form a minterm")
        return cls(lits, *shape)


def _cardinality_shape(lits: frozenset[TestLiteral]):
    lower, upper, uge, ult = [], [], 0, 0
    for lit in lits:
        a = lit.atom
        if isinstance(a, HeapGe):
            (lower if lit.positive else upper).append(a.n)
        elif isinstance(a, HeapGeUnivMinus):
            (lower if lit.positive else upper).append(UnivMinus(a.n))
        elif isinstance(a, UnivGe):
            if lit.positive:
                uge += 1
            else:
                ult += 1
    if len(lower) != 1 or len(upper) != 1 or uge != 1 or ult > 1:
        return None
    return lower[0], upper[0]


def is_minterm(literals: Iterable[TestLiteral]) -> bool:
    """Exactly one |h| lower bound, exactly one |h| upper bound, exactly one
    positive |U| bound and at most one negative one."""
    return _cardinality_shape(frozenset(literals)) is not None


_BOOL = (Not, And, Or, Implies, Iff)


def is_test_combination(phi: Formula, domain_independent: bool = False) -> bool:
    """Quantifier-free boolean combination of test atoms."""
    for s in subformulas(phi):
        if isinstance(s, _BOOL) or isinstance(s, (Top, Bottom)):
            continue
        if isinstance(s, TEST_ATOMS):
            if domain_independent and isinstance(s, (UnivGe, HeapGeUnivMinus)):
                return False
            continue
        return False
    return True


def offending_subformula(phi: Formula, domain_independent: bool = False) -> Formula | None:
    """First subformula (pre-order) that breaks ``is_test_combination``."""
    for s in subformulas(phi):
        if isinstance(s, _BOOL) or isinstance(s, (Top, Bottom)):
            continue
        if isinstance(s, TEST_ATOMS):
            if domain_independent and isinstance(s, (UnivGe, HeapGeUnivMinus)):
                return s
            continue
        return s
    return None


def conservative_maxn(phi: Formula) -> int:
    """Syntactic upper bound on the cardinality constants of any minterm.

    emp and x |-> y count 2, a test atom its constant plus one (atoms without
    a constant count 1), negation keeps the bound, boolean binary
    connectives take the maximum and * / -* add one to the sum.
    """
    if not is_quantifier_free(phi):
        raise ValueError("conservative_maxn expects a quantifier-free formula")
    return _maxn(phi)


def _maxn(phi: Formula) -> int:
    if isinstance(phi, (Emp, PointsTo)):
        return 2
    if isinstance(phi, (HeapGe, UnivGe, HeapGeUnivMinus)):
        return phi.n + 1
    if isinstance(phi, (Eq, Hooks, Alloc, Top, Bottom)):
        return 1
    if isinstance(phi, Not):
        return _maxn(phi.arg)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return max(_maxn(phi.left), _maxn(phi.right))
    if isinstance(phi, (Star, Wand)):
        return _maxn(phi.left) + _maxn(phi.right) + 1
    raise TypeError(f"not an SL formula: {phi!r}")


def desugar_spatial_atoms(phi: Formula) -> Formula:
    """Rewrite emp as !|h| >= 1 and x |-> y as x ~> y & !|h| >= 2."""
    if isinstance(phi, Emp):
        return Not(HeapGe(1))
    if isinstance(phi, PointsTo):
        return And(Hooks(phi.src, phi.dst), Not(HeapGe(2)))
    if isinstance(phi, Not):
        return Not(desugar_spatial_atoms(phi.arg))
    if isinstance(phi, (And, Or, Implies, Iff, Star, Wand)):
        return type(phi)(desugar_spatial_atoms(phi.left), desugar_spatial_atoms(phi.right))
    from .formula import BINDERS

    if isinstance(phi, BINDERS):
        return type(phi)(phi.var, desugar_spatial_atoms(phi.body))
    return phi


def normalize_for_infinite(phi: Formula) -> Formula:
    """Replace |U| >= n by true and |h| >= |U| - n by false.

    On an infinite universe the first always holds and the second never
    does, because heaps are finite.
    """
    bad = offending_subformula(phi)
    if bad is not None:
        raise NotATestCombination(f"not a test combination: {bad}")
    return _normalize(phi)


def _normalize(phi: Formula) -> Formula:
    if isinstance(phi, UnivGe):
        return Top()
    if isinstance(phi, HeapGeUnivMinus):
        return Bottom()
    if isinstance(phi, Not):
        return Not(_normalize(phi.arg))
    if isinstance(phi, (And, Or, Implies, Iff)):
        return type(phi)(_normalize(phi.left), _normalize(phi.right))
    return phi


def is_domain_independent(phi: Formula) -> bool:
    """No universe-size atoms and no magic wand anywhere in phi."""
    return not any(isinstance(s, (UnivGe, HeapGeUnivMinus, Wand)) for s in subformulas(phi))
