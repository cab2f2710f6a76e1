"""Shrinking structures while keeping existential sentences true.

Given variables X and extra locations L, ``V = L ∪ s(X)``; ``Vbar`` is
everything reachable from V through the heap and ``W`` adds to V the
reachable locations with two or more reachable predecessors.  Between
W-locations the heap forms simple chains (segments).  ``contract`` cuts
every segment down to at most N cells, ``restrict`` drops everything not
reachable from V.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .structures import SLStructure


class ContractionError(ValueError):
    pass


@dataclass(frozen=True)
class FrontierSets:
    V: frozenset[int]
    Vbar: frozenset[int]
    W: frozenset[int]


def _check(i: SLStructure, xs: Iterable[str], locs: Iterable[int]) -> tuple[list[str], frozenset[int]]:
    xs = sorted(set(xs))
    locs = frozenset(locs)
    for x in xs:
        if x not in i.s:
            raise ContractionError(f"store undefined on {x}")
    if not locs <= i.universe:
        raise ContractionError(f"locations {sorted(locs - i.universe)} are outside the universe")
    return xs, locs


def frontier_sets(i: SLStructure, xs: Iterable[str], locs: Iterable[int]) -> FrontierSets:
    xs, locs = _check(i, xs, locs)
    h = i.h
    v = locs | {i.s[x] for x in xs}
    vbar = set(v)
    todo = list(v)
    while todo:
        t = h.get(todo.pop())
        if t is not None and t not in vbar:
            vbar.add(t)
            todo.append(t)
    preds: dict[int, int] = {}
    for a in vbar:
        if a in h:
            preds[h[a]] = preds.get(h[a], 0) + 1
    w = v | {loc for loc, c in preds.items() if c >= 2}
    return FrontierSets(frozenset(v), frozenset(vbar), frozenset(w))


def segment(i: SLStructure, start: int, sets: FrontierSets, n: float = math.inf) -> tuple[int, ...]:
    """The chain from ``start`` through allocated non-W cells.

    It stops at the last cell whose successor is in W or unallocated, and
    keeps the first min(len - 1, n) + 1 cells.  A chain that runs back into
    itself without meeting W stops before the repeat.
    """
    h = i.h
    if start not in h:
        raise ContractionError(f"location {start} is not allocated")
    seq = [start]
    seen = {start}
    cur = start
    while True:
        nxt = h[cur]
        if nxt in sets.W or nxt not in h or nxt in seen:
            break
        seq.append(nxt)
        seen.add(nxt)
        cur = nxt
    keep = min(len(seq) - 1, n) + 1
    return tuple(seq[:int(keep)])


def _full_segment(i: SLStructure, start: int, sets: FrontierSets) -> tuple[int, ...]:
    # an unallocated W location is a segment of its own
    if start not in i.h:
        return (start,)
    return segment(i, start, sets)


def contract(i: SLStructure, n: int, xs: Iterable[str], locs: Iterable[int]) -> SLStructure:
    """Cut each segment starting in W to at most n + 1 cells.

    The last kept cell is redirected to where the chain would have led:
    the next W location, or the unallocated cell the chain ends on.  That
    target is kept in the universe.
    """
    if not isinstance(n, int) or n < 1:
        raise ContractionError("the contraction bound must be an integer >= 1")
    sets = frontier_sets(i, xs, locs)
    h = i.h
    outside = i.universe - sets.Vbar
    uni = set(outside) | set(sets.W)
    heap = {a: h[a] for a in outside | sets.W if a in h}
    for start in sorted(sets.W):
        seg = _full_segment(i, start, sets)
        kept = seg[:min(len(seg) - 1, n) + 1]
        uni.update(kept)
        for a in kept[1:-1]:
            heap[a] = h[a]
        last = kept[-1]
        if last in h:
            target = _retarget(h, last, sets.W)
            heap[last] = target
            uni.add(target)
    removed = i.universe - uni
    for a, b in heap.items():
        if b in removed:
            raise ContractionError(
                f"cell {a}->{b} outside the reachable part points into a removed segment cell")
    store = {v: loc for v, loc in i.store if loc in uni}
    return SLStructure(frozenset(uni), store, heap)


def _retarget(h: dict, loc: int, w: frozenset[int]) -> int:
    """h^i(loc) for the least i > 0 landing in W or on an unallocated cell."""
    cur = h[loc]
    steps = 0
    while cur not in w and cur in h:
        cur = h[cur]
        steps += 1
        if steps > len(h):
            break
    return cur


def restrict(i: SLStructure, xs: Iterable[str], locs: Iterable[int]) -> SLStructure:
    """Keep only the locations reachable from L ∪ s(X).

    Store entries pointing outside the kept part are dropped.
    """
    sets = frontier_sets(i, xs, locs)
    if not sets.Vbar:
        raise ContractionError("nothing is reachable: the restricted universe would be empty")
    heap = {a: b for a, b in i.heap if a in sets.Vbar}
    assert all(b in sets.Vbar for b in heap.values())
    store = {v: loc for v, loc in i.store if loc in sets.Vbar}
    return SLStructure(sets.Vbar, store, heap)


def size_bound(i: SLStructure, n: int, xs: Iterable[str], locs: Iterable[int]) -> int:
    """2N(|s(X)| + |L|), the claimed cap on |U'| - |U \\ Vbar|."""
    xs, locs = _check(i, xs, locs)
    return 2 * n * (len({i.s[x] for x in xs}) + len(locs))


def choose_locations(i: SLStructure, xs: Iterable[str], n: int) -> frozenset[int] | None:
    """Pick L = L1 ∪ L2 with |L ∩ dom(h)| = n and
    |(L ∪ s(X)) \\ dom(h)| = min(|U \\ dom(h)|, n + 1).

    Lowest locations first.  None when |dom(h)| < n + |X|, or when the
    unallocated variable locations alone already exceed n + 1.
    """
    xs, _ = _check(i, xs, ())
    dom = i.dom()
    sx = {i.s[x] for x in xs}
    if len(dom) < n + len(xs):
        return None
    l1 = sorted((i.universe - sx) & dom)[:n]
    unalloc = i.universe - dom
    want = min(len(unalloc), n + 1) - len(sx - dom)
    if want < 0:
        return None
    l2 = sorted((i.universe - sx) - dom)[:want]
    chosen = frozenset(l1) | frozenset(l2)
    assert len(chosen & dom) == n
    assert len((chosen | sx) - dom) == min(len(unalloc), n + 1)
    return chosen
