"""Seeded random formulae and structures for fuzzing and property tests."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .formula import (
    Alloc, And, App, Bottom, Emp, Eq, Formula, HeapGe, HeapGeUnivMinus, Hooks,
    Iff, Implies, Not, Or, PointsTo, Pred, Star, TermEq, Top, UnivGe, Var, Wand,
    exists, forall,
)
from .structures import FOStructure, SLStructure


@dataclass(frozen=True)
class GenConfig:
    max_quantifiers: int = 3
    max_nodes: int = 12
    max_const: int = 2
    spatial: bool = True
    test_atoms: bool = True


def _split(rng: random.Random, budget: int) -> tuple[int, int]:
    left = rng.randint(1, budget - 2)
    return left, budget - 1 - left


def random_sl(rng: random.Random, names: Sequence[str], nodes: int, cfg: GenConfig) -> Formula:
    """A quantifier-free SL(1) formula with exactly ``nodes`` AST nodes."""
    if nodes <= 1:
        return _sl_atom(rng, names, cfg)
    if nodes == 2:
        return Not(_sl_atom(rng, names, cfg))
    ops = [And, Or, Not, Implies, Iff]
    weights = [4, 4, 3, 1, 1]
    if cfg.spatial:
        ops += [Star, Wand]
        weights += [3, 2]
    op = rng.choices(ops, weights)[0]
    if op is Not:
        return Not(random_sl(rng, names, nodes - 1, cfg))
    a, b = _split(rng, nodes)
    return op(random_sl(rng, names, a, cfg), random_sl(rng, names, b, cfg))


def _sl_atom(rng: random.Random, names: Sequence[str], cfg: GenConfig) -> Formula:
    kinds = ["true", "false"]
    weights = [1, 1]
    if names:
        kinds += ["eq", "hook", "alloc"]
        weights += [3, 3, 3]
        if cfg.spatial:
            kinds.append("pto")
            weights.append(3)
    if cfg.spatial:
        kinds.append("emp")
        weights.append(2)
    if cfg.test_atoms:
        kinds += ["hge", "uge", "hgum"]
        weights += [3, 1, 2]
    k = rng.choices(kinds, weights)[0]
    pick = lambda: rng.choice(list(names))  # noqa: E731
    c = rng.randint(0, cfg.max_const)
    return {
        "true": lambda: Top(),
        "false": lambda: Bottom(),
        "emp": lambda: Emp(),
        "eq": lambda: Eq(pick(), pick()),
        "hook": lambda: Hooks(pick(), pick()),
        "alloc": lambda: Alloc(pick()),
        "pto": lambda: PointsTo(pick(), pick()),
        "hge": lambda: HeapGe(c),
        "uge": lambda: UnivGe(c),
        "hgum": lambda: HeapGeUnivMinus(c),
    }[k]()


def random_test_combination(rng: random.Random, names: Sequence[str], nodes: int,
                            max_const: int = 2, domain_independent: bool = False) -> Formula:
    """Boolean combination of test atoms (no emp, |->, *, -*)."""
    if nodes <= 1:
        kinds = ["eq", "hook", "alloc", "hge"] if names else ["hge"]
        if not domain_independent:
            kinds += ["uge", "hgum"]
        k = rng.choice(kinds)
        c = rng.randint(0, max_const)
        if k == "eq":
            return Eq(rng.choice(names), rng.choice(names))
        if k == "hook":
            return Hooks(rng.choice(names), rng.choice(names))
        if k == "alloc":
            return Alloc(rng.choice(names))
        return {"hge": HeapGe, "uge": UnivGe, "hgum": HeapGeUnivMinus}[k](c)
    if nodes == 2 or rng.random() < 0.2:
        return Not(random_test_combination(rng, names, nodes - 1, max_const, domain_independent))
    a, b = _split(rng, nodes) if nodes >= 3 else (1, 1)
    op = rng.choice([And, Or, Implies])
    return op(random_test_combination(rng, names, a, max_const, domain_independent),
              random_test_combination(rng, names, b, max_const, domain_independent))


def random_bsr(rng: random.Random, cfg: GenConfig) -> Formula:
    """A closed sentence ∃x1..xn ∀y1..ym. φ with n + m <= cfg.max_quantifiers."""
    total = rng.randint(0, cfg.max_quantifiers)
    n = rng.randint(0, total)
    m = total - n
    xs = [f"x{i + 1}" for i in range(n)]
    ys = [f"y{i + 1}" for i in range(m)]
    nodes = rng.randint(1, cfg.max_nodes)
    matrix = random_sl(rng, xs + ys, nodes, cfg)
    return exists(xs, forall(ys, matrix))


def random_structure(rng: random.Random, size: int, names: Sequence[str] = (),
                     density: float | None = None) -> SLStructure:
    p = rng.random() if density is None else density
    heap = {loc: rng.randrange(size) for loc in range(size) if rng.random() < p}
    store = {v: rng.randrange(size) for v in names}
    return SLStructure.of_size(size, store, heap)


def random_fo(rng: random.Random, names: Sequence[str], nodes: int, depth: int = 2,
              preds: Sequence[str] = ()) -> Formula:
    """Quantifier-free FO formula over terms of bounded nesting."""

    def term():
        t = Var(rng.choice(list(names)))
        for _ in range(rng.randint(0, depth)):
            t = App(t)
        return t

    def go(k: int) -> Formula:
        if k <= 1:
            if preds and rng.random() < 0.3:
                return Pred(rng.choice(list(preds)), term())
            return TermEq(term(), term())
        if k == 2:
            return Not(go(1))
        a, b = _split(rng, k)
        return rng.choice([And, Or, Implies])(go(a), go(b))

    return go(nodes)


def random_fo_structure(rng: random.Random, size: int, names: Sequence[str] = (),
                        preds: Sequence[str] = ()) -> FOStructure:
    uni = range(size)
    fn = {loc: rng.randrange(size) for loc in uni}
    ps = {p: frozenset(loc for loc in uni if rng.random() < 0.5) for p in preds}
    store = {v: rng.randrange(size) for v in names}
    return FOStructure(frozenset(uni), store, fn, ps)
