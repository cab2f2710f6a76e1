"""Quantifier-free SL(1) evaluation on heap types.

For a tuple of variables the *type* of a structure records which variables
share a location, where each such location points (nowhere, to one of the
variable locations, or somewhere else), how many other locations are
allocated, and the universe size.  Quantifier-free SL(1) formulae cannot
tell apart structures of the same type, so ``*`` and ``-*`` can be evaluated
on types instead of heaps: a split chooses which allocated variable
locations go left and how many anonymous cells go left, an extension
chooses targets for unallocated variable locations and a number of fresh
anonymous cells.

Results are bit masks over the anonymous-cell count ``a``: bit ``a`` is set
when the formula holds with ``a`` allocated locations outside the variable
locations.  With ``F = |U| - k`` free locations (``k`` variable locations)
the meaningful range is ``0 <= a <= F``.
"""
from __future__ import annotations

from itertools import product
from typing import Mapping, Sequence

from .formula import (
    Alloc, And, Bottom, Emp, Eq, Exists, Forall, Formula, HeapGe,
    HeapGeUnivMinus, Hooks, Iff, Implies, Not, Or, PointsTo, Star, Top, UnivGe,
    Wand, free_vars, is_quantifier_free,
)
from .structures import SLStructure

NONE = -1
OTHER = -2


def _minkowski(m1: int, m2: int) -> int:
    """{a + b : a in m1, b in m2} on bit masks."""
    if m1.bit_count() > m2.bit_count():
        m1, m2 = m2, m1
    out = 0
    i = 0
    while m1:
        if m1 & 1:
            out |= m2 << i
        m1 >>= 1
        i += 1
    return out


class Matrix:
    """A quantifier-free formula compiled against an ordered variable list."""

    def __init__(self, phi: Formula, names: Sequence[str]):
        if not is_quantifier_free(phi):
            raise ValueError("type evaluation needs a quantifier-free formula")
        self.names = tuple(names)
        missing = free_vars(phi) - set(self.names)
        if missing:
            raise ValueError(f"variables {sorted(missing)} not in the variable list")
        self.index = {v: i for i, v in enumerate(self.names)}
        self.nodes: list[tuple] = []
        self._ids: dict[Formula, int] = {}
        self.root = self._compile(phi)
        self.has_spatial = any(n[0] in ("star", "wand", "emp", "pto") for n in self.nodes)
        self._contexts: dict[tuple, _Context] = {}

    def _compile(self, phi: Formula) -> int:
        if phi in self._ids:
            return self._ids[phi]
        ix = self.index
        if isinstance(phi, Top):
            node: tuple = ("top",)
        elif isinstance(phi, Bottom):
            node = ("bot",)
        elif isinstance(phi, Emp):
            node = ("emp",)
        elif isinstance(phi, Eq):
            node = ("eq", ix[phi.left], ix[phi.right])
        elif isinstance(phi, PointsTo):
            node = ("pto", ix[phi.src], ix[phi.dst])
        elif isinstance(phi, Hooks):
            node = ("hook", ix[phi.src], ix[phi.dst])
        elif isinstance(phi, Alloc):
            node = ("alloc", ix[phi.var])
        elif isinstance(phi, HeapGe):
            node = ("hge", phi.n)
        elif isinstance(phi, UnivGe):
            node = ("uge", phi.n)
        elif isinstance(phi, HeapGeUnivMinus):
            node = ("hgum", phi.n)
        elif isinstance(phi, Not):
            node = ("not", self._compile(phi.arg))
        elif isinstance(phi, And):
            node = ("and", self._compile(phi.left), self._compile(phi.right))
        elif isinstance(phi, Or):
            node = ("or", self._compile(phi.left), self._compile(phi.right))
        elif isinstance(phi, Implies):
            node = ("imp", self._compile(phi.left), self._compile(phi.right))
        elif isinstance(phi, Iff):
            node = ("iff", self._compile(phi.left), self._compile(phi.right))
        elif isinstance(phi, Star):
            node = ("star", self._compile(phi.left), self._compile(phi.right))
        elif isinstance(phi, Wand):
            node = ("wand", self._compile(phi.left), self._compile(phi.right))
        else:
            raise TypeError(f"not an SL formula: {phi!r}")
        self.nodes.append(node)
        self._ids[phi] = len(self.nodes) - 1
        return len(self.nodes) - 1

    def context(self, u: int, cls: tuple[int, ...]) -> "_Context":
        key = (u, cls)
        ctx = self._contexts.get(key)
        if ctx is None:
            ctx = _Context(self, u, cls)
            self._contexts[key] = ctx
        return ctx

    def mask(self, u: int, cls: tuple[int, ...], succ: tuple[int, ...]) -> int:
        """Bit mask over the anonymous allocation count ``a``."""
        return self.context(u, cls).eval(self.root, succ)

    def heap_mask(self, u: int, cls: tuple[int, ...], succ: tuple[int, ...]) -> int:
        """Bit mask over the total heap size |dom(h)|."""
        c = sum(1 for t in succ if t != NONE)
        return self.mask(u, cls, succ) << c

    def holds(self, u: int, values: Sequence[int], heap: Mapping[int, int], heap_size: int | None = None) -> bool:
        cls, succ, c = tuple_type(values, heap)
        hs = len(heap) if heap_size is None else heap_size
        return bool(self.mask(u, cls, succ) >> (hs - c) & 1)


def tuple_type(values: Sequence[int], heap: Mapping[int, int]):
    """(classes, successor per class, number of allocated classes)."""
    first: dict[int, int] = {}
    cls = []
    for v in values:
        if v not in first:
            first[v] = len(first)
        cls.append(first[v])
    succ = []
    c = 0
    for loc in first:
        t = heap.get(loc)
        if t is None:
            succ.append(NONE)
        else:
            c += 1
            succ.append(first.get(t, OTHER))
    return tuple(cls), tuple(succ), c


class _Context:
    def __init__(self, mat: Matrix, u: int, cls: tuple[int, ...]):
        self.mat = mat
        self.u = u
        self.cls = cls
        self.k = (max(cls) + 1) if cls else 0
        self.free = u - self.k
        if self.free < 0:
            raise ValueError("more variable locations than the universe holds")
        self.full = (1 << (self.free + 1)) - 1
        self.targets = list(range(self.k)) + ([OTHER] if self.free >= 1 else [])
        self.memo: dict[tuple[int, tuple], int] = {}

    def eval(self, node_id: int, succ: tuple[int, ...]) -> int:
        key = (node_id, succ)
        r = self.memo.get(key)
        if r is None:
            r = self._eval(self.mat.nodes[node_id], succ)
            self.memo[key] = r
        return r

    def _at_least(self, n: int) -> int:
        if n <= 0:
            return self.full
        return self.full & ~((1 << n) - 1)

    def _eval(self, node: tuple, succ: tuple[int, ...]) -> int:
        op = node[0]
        full = self.full
        cls = self.cls
        if op == "top":
            return full
        if op == "bot":
            return 0
        if op == "emp":
            return 1 if all(t == NONE for t in succ) else 0
        if op == "eq":
            return full if cls[node[1]] == cls[node[2]] else 0
        if op == "pto":
            src, dst = cls[node[1]], cls[node[2]]
            ok = succ[src] == dst and all(t == NONE for i, t in enumerate(succ) if i != src)
            return 1 if ok else 0
        if op == "hook":
            return full if succ[cls[node[1]]] == cls[node[2]] else 0
        if op == "alloc":
            return full if succ[cls[node[1]]] != NONE else 0
        c = sum(1 for t in succ if t != NONE)
        if op == "hge":
            return self._at_least(node[1] - c)
        if op == "uge":
            return full if self.u >= node[1] else 0
        if op == "hgum":
            return self._at_least(self.u - node[1] - c)
        if op == "not":
            return full & ~self.eval(node[1], succ)
        if op in ("and", "or", "imp", "iff"):
            a = self.eval(node[1], succ)
            b = self.eval(node[2], succ)
            if op == "and":
                return a & b
            if op == "or":
                return a | b
            if op == "imp":
                return (full & ~a) | b
            return full & ~(a ^ b)
        if op == "star":
            return self._star(node[1], node[2], succ)
        if op == "wand":
            return self._wand(node[1], node[2], succ)
        raise AssertionError(op)

    def _star(self, left: int, right: int, succ: tuple[int, ...]) -> int:
        alloc = [i for i, t in enumerate(succ) if t != NONE]
        out = 0
        for pick in product((False, True), repeat=len(alloc)):
            s1 = list(succ)
            s2 = list(succ)
            for i, p in zip(alloc, pick):
                if p:
                    s2[i] = NONE
                else:
                    s1[i] = NONE
            m1 = self.eval(left, tuple(s1))
            if not m1:
                continue
            m2 = self.eval(right, tuple(s2))
            if not m2:
                continue
            out |= _minkowski(m1, m2)
            if out & self.full == self.full:
                break
        return out & self.full

    def _wand(self, left: int, right: int, succ: tuple[int, ...]) -> int:
        unalloc = [i for i, t in enumerate(succ) if t == NONE]
        full = self.full
        bad = 0
        for pick in product([NONE] + self.targets, repeat=len(unalloc)):
            ext = [NONE] * len(succ)
            comb = list(succ)
            for i, t in zip(unalloc, pick):
                ext[i] = t
                comb[i] = t
            ml = self.eval(left, tuple(ext))
            if not ml:
                continue
            not_right = full & ~self.eval(right, tuple(comb))
            if not not_right:
                continue
            # a is bad when some a' in ml has a + a' outside the right mask
            i = 0
            while ml:
                if ml & 1:
                    bad |= not_right >> i
                ml >>= 1
                i += 1
            if bad & full == full:
                break
        return full & ~bad


# -- whole-structure evaluation ------------------------------------------------


def fast_eval_qf(i: SLStructure, phi: Formula, env: Mapping[str, int] | None = None,
                 matrix: Matrix | None = None) -> bool:
    """Quantifier-free truth in a concrete structure through its type."""
    store = dict(i.s)
    if env:
        store.update(env)
    if matrix is None:
        names = sorted(free_vars(phi))
        matrix = Matrix(phi, names)
    try:
        values = [store[v] for v in matrix.names]
    except KeyError as e:
        from .semantics import UnboundVariable

        raise UnboundVariable(e.args[0]) from None
    return matrix.holds(len(i.universe), values, i.h)


def fast_eval_sl(i: SLStructure, phi: Formula, env: Mapping[str, int] | None = None) -> bool:
    """Same answer as ``eval_sl``; quantifier-free parts go through types.

    Quantifiers are expanded over the universe.  A quantifier below a
    spatial connective falls back to the exhaustive checker.
    """
    from .semantics import eval_sl

    store = dict(i.s)
    if env:
        store.update(env)
    cache: dict[Formula, Matrix] = {}
    uni = sorted(i.universe)
    u = len(uni)
    h = i.h

    def go(phi: Formula, s: dict) -> bool:
        if is_quantifier_free(phi):
            mat = cache.get(phi)
            if mat is None:
                mat = Matrix(phi, sorted(free_vars(phi)))
                cache[phi] = mat
            return mat.holds(u, [s[v] for v in mat.names], h)
        if isinstance(phi, (Exists, Forall)):
            want = isinstance(phi, Exists)
            for loc in uni:
                if go(phi.body, {**s, phi.var: loc}) == want:
                    return want
            return not want
        if isinstance(phi, Not):
            return not go(phi.arg, s)
        if isinstance(phi, And):
            return go(phi.left, s) and go(phi.right, s)
        if isinstance(phi, Or):
            return go(phi.left, s) or go(phi.right, s)
        if isinstance(phi, Implies):
            return (not go(phi.left, s)) or go(phi.right, s)
        if isinstance(phi, Iff):
            return go(phi.left, s) == go(phi.right, s)
        return eval_sl(i, phi, s)

    missing = free_vars(phi) - set(store)
    if missing:
        from .semantics import UnboundVariable

        raise UnboundVariable(sorted(missing)[0])
    return go(phi, store)

