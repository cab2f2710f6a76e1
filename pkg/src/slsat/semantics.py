"""Reference model checkers.

``eval_sl`` follows the semantics literally: ``*`` tries every split of the
heap and ``-*`` tries every disjoint extension over the same universe.  It
is exponential and meant for small structures; ``fast_eval_sl`` in
``typeeval`` answers the same question through the type abstraction.
"""
from __future__ import annotations

from itertools import product
from typing import Iterator, Mapping

from .formula import (
    Alloc, And, Bottom, Emp, Eq, Exists, Forall, Formula, HeapGe,
    HeapGeUnivMinus, Hooks, Iff, Implies, Not, Or, PointsTo, Pred, Star, Term,
    TermEq, Top, UnivGe, Var, Wand,
)
from .structures import FOStructure, SLStructure


class UnboundVariable(KeyError):
    pass


def heap_splits(heap: Mapping[int, int]) -> Iterator[tuple[dict, dict]]:
    """All (h1, h2) with h1 ⊎ h2 = heap, h1 growing in lexicographic order."""
    cells = sorted(heap.items())
    for mask in product((False, True), repeat=len(cells)):
        h1 = {a: b for (a, b), m in zip(cells, mask) if m}
        h2 = {a: b for (a, b), m in zip(cells, mask) if not m}
        yield h1, h2


def disjoint_extensions(universe, heap: Mapping[int, int]) -> Iterator[dict]:
    """All heaps over ``universe`` whose domain avoids dom(heap).

    There are (|U| + 1) ** (|U| - |dom(heap)|) of them.
    """
    free = sorted(set(universe) - set(heap))
    targets = [None] + sorted(universe)
    for row in product(targets, repeat=len(free)):
        yield {a: b for a, b in zip(free, row) if b is not None}


def eval_sl(i: SLStructure, phi: Formula, env: Mapping[str, int] | None = None) -> bool:
    """Truth of an SL(1) formula in a structure (quantifiers range over U)."""
    store = dict(i.s)
    if env:
        store.update(env)
    return _sl(phi, i.universe, store, i.h)


def _look(store: dict, v: str) -> int:
    try:
        return store[v]
    except KeyError:
        raise UnboundVariable(v) from None


def _sl(phi: Formula, uni: frozenset, s: dict, h: dict) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Emp):
        return not h
    if isinstance(phi, Eq):
        return _look(s, phi.left) == _look(s, phi.right)
    if isinstance(phi, PointsTo):
        a = _look(s, phi.src)
        return len(h) == 1 and h.get(a, None) == _look(s, phi.dst)
    if isinstance(phi, Hooks):
        a = _look(s, phi.src)
        return a in h and h[a] == _look(s, phi.dst)
    if isinstance(phi, Alloc):
        return _look(s, phi.var) in h
    if isinstance(phi, HeapGe):
        return len(h) >= phi.n
    if isinstance(phi, UnivGe):
        return len(uni) >= phi.n
    if isinstance(phi, HeapGeUnivMinus):
        return len(h) >= len(uni) - phi.n
    if isinstance(phi, Not):
        return not _sl(phi.arg, uni, s, h)
    if isinstance(phi, And):
        return _sl(phi.left, uni, s, h) and _sl(phi.right, uni, s, h)
    if isinstance(phi, Or):
        return _sl(phi.left, uni, s, h) or _sl(phi.right, uni, s, h)
    if isinstance(phi, Implies):
        return (not _sl(phi.left, uni, s, h)) or _sl(phi.right, uni, s, h)
    if isinstance(phi, Iff):
        return _sl(phi.left, uni, s, h) == _sl(phi.right, uni, s, h)
    if isinstance(phi, Star):
        return any(_sl(phi.left, uni, s, h1) and _sl(phi.right, uni, s, h2)
                   for h1, h2 in heap_splits(h))
    if isinstance(phi, Wand):
        for ext in disjoint_extensions(uni, h):
            if _sl(phi.left, uni, s, ext) and not _sl(phi.right, uni, s, {**h, **ext}):
                return False
        return True
    if isinstance(phi, (Exists, Forall)):
        old = s.get(phi.var, None)
        had = phi.var in s
        want = isinstance(phi, Exists)
        result = not want
        for loc in sorted(uni):
            s[phi.var] = loc
            if _sl(phi.body, uni, s, h) == want:
                result = want
                break
        if had:
            s[phi.var] = old
        else:
            del s[phi.var]
        return result
    raise TypeError(f"not an SL formula: {phi!r}")


def septraction_holds(i: SLStructure, left: Formula, right: Formula,
                      env: Mapping[str, int] | None = None) -> bool:
    """Some disjoint extension satisfies ``left`` and, added to the heap,
    makes ``right`` true.  The direct dual of the wand, without negations."""
    store = dict(i.s)
    if env:
        store.update(env)
    h = i.h
    return any(_sl(left, i.universe, store, ext) and _sl(right, i.universe, store, {**h, **ext})
               for ext in disjoint_extensions(i.universe, h))


# -- FO --------------------------------------------------------------------


def eval_term(m: FOStructure, t: Term, s: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        return _look(s, t.name)  # type: ignore[arg-type]
    return m.f[eval_term(m, t.arg, s)]


def eval_fo(m: FOStructure, phi: Formula, env: Mapping[str, int] | None = None) -> bool:
    store = dict(m.s)
    if env:
        store.update(env)
    return _fo(phi, m, store)


def _fo(phi: Formula, m: FOStructure, s: dict) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, TermEq):
        return eval_term(m, phi.left, s) == eval_term(m, phi.right, s)
    if isinstance(phi, Pred):
        try:
            ext = m.p[phi.name]
        except KeyError:
            raise KeyError(f"unknown predicate {phi.name!r}") from None
        return eval_term(m, phi.arg, s) in ext
    if isinstance(phi, Eq):
        return _look(s, phi.left) == _look(s, phi.right)
    if isinstance(phi, Not):
        return not _fo(phi.arg, m, s)
    if isinstance(phi, And):
        return _fo(phi.left, m, s) and _fo(phi.right, m, s)
    if isinstance(phi, Or):
        return _fo(phi.left, m, s) or _fo(phi.right, m, s)
    if isinstance(phi, Implies):
        return (not _fo(phi.left, m, s)) or _fo(phi.right, m, s)
    if isinstance(phi, Iff):
        return _fo(phi.left, m, s) == _fo(phi.right, m, s)
    if isinstance(phi, (Exists, Forall)):
        had = phi.var in s
        old = s.get(phi.var)
        want = isinstance(phi, Exists)
        result = not want
        for loc in sorted(m.universe):
            s[phi.var] = loc
            if _fo(phi.body, m, s) == want:
                result = want
                break
        if had:
            s[phi.var] = old
        else:
            del s[phi.var]
        return result
    raise TypeError(f"not an FO formula: {phi!r}")

