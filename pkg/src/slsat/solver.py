"""Satisfiability checking for prenex SL(1).

``check_finite_sat`` decides ∃*∀* sentences by searching every structure up
to the small-model bound.  The search fixes the existential witnesses on
the first locations, assigns heap cells location by location in
least-number order (a fresh target is always the next untouched
location) and evaluates the matrix on heap types, which gives a bit mask
of admissible heap sizes per universal assignment.  A branch is cut when
no heap size stays admissible.

``oracle_sat`` is an independent bounded enumerator used to cross-check.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping

import numpy as np

from .formula import (
    Exists, Formula, Forall, Star, Wand, bsr_shape, free_vars, is_closed,
    is_quantifier_free, split_prefix, standardize_prenex, subformulas,
)
from .reductions import TranslationError, infinite_to_finite
from .semantics import eval_fo, eval_sl
from .structures import FOStructure, SLStructure, canonical_stores, elems
from .testform import conservative_maxn, is_domain_independent
from .typeeval import NONE, OTHER, Matrix, fast_eval_sl


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"

    @property
    def exit_code(self) -> int:
        return {"SAT": 10, "UNSAT": 20, "UNKNOWN": 30}[self.value]


class NotBSR(ValueError):
    pass


@dataclass(frozen=True)
class SatResult:
    status: Status
    witness: SLStructure | FOStructure | None = None
    bound_used: int = 0
    stats: Mapping[str, object] = field(default_factory=dict, compare=False)
    note: str = ""

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT


# -- the bound ---------------------------------------------------------------------


def _bsr(phi: Formula) -> tuple[int, int, Formula]:
    shape = bsr_shape(phi)
    if shape is None:
        raise NotBSR("formula is not of the form exists* forall* matrix")
    if not is_closed(phi):
        raise NotBSR(f"formula has free variables {sorted(free_vars(phi))}")
    _, matrix = split_prefix(phi)
    return shape[0], shape[1], matrix


def small_model_bound(phi: Formula) -> int:
    """max(2N + 3n + m, 2m(n + 2N + 1), n + m + 1), N = conservative_maxn."""
    n, m, matrix = _bsr(phi)
    big_n = conservative_maxn(matrix)
    return max(2 * big_n + 3 * n + m, 2 * m * (n + 2 * big_n + 1), n + m + 1)


# -- witness checking ----------------------------------------------------------------


def _literal_cost(phi: Formula, u: int, dom: int) -> float:
    free = u - dom
    if isinstance(phi, (Exists, Forall)):
        return u * _literal_cost(phi.body, u, dom)
    if isinstance(phi, Star):
        return 2 ** dom * (_literal_cost(phi.left, u, dom) + _literal_cost(phi.right, u, dom))
    if isinstance(phi, Wand):
        return (u + 1) ** free * (_literal_cost(phi.left, u, u) + _literal_cost(phi.right, u, u))
    kids = [getattr(phi, a) for a in ("arg", "left", "right") if hasattr(phi, a)]
    return 1 + sum(_literal_cost(k, u, dom) for k in kids)


LITERAL_BUDGET = 200_000


def check_witness(phi: Formula, i: SLStructure) -> str:
    """Re-evaluate a witness; return which evaluator confirmed it.

    The literal evaluator is used whenever its estimated cost is small,
    otherwise the type-based one.  Raises AssertionError on failure.
    """
    if _literal_cost(phi, i.size, len(i.heap)) <= LITERAL_BUDGET:
        assert eval_sl(i, phi), f"witness does not satisfy the formula:\n{i}"
        return "literal"
    assert fast_eval_sl(i, phi), f"witness does not satisfy the formula:\n{i}"
    return "types"


# -- the search ------------------------------------------------------------------------


def _partitions(n: int, u: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length n with values below u."""
    def go(i, top, acc):
        if i == n:
            yield tuple(acc)
            return
        for v in range(min(top + 2, u)):
            acc.append(v)
            yield from go(i + 1, max(top, v), acc)
            acc.pop()
    yield from go(0, -1, [])


class _Budget:
    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1) -> bool:
        self.used += k
        return self.limit is not None and self.used > self.limit


class _OutOfBudget(Exception):
    pass


def _grid(shape: tuple[int, ...]) -> np.ndarray:
    """All index tuples of ``shape`` as rows; one empty row for ()."""
    if not shape:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices(shape).reshape(len(shape), -1).T


class _Search:
    """Backtracking over heaps for one universe size and one store."""

    def __init__(self, mat: Matrix, n: int, m: int, u: int, xvals: tuple[int, ...], budget: _Budget):
        self.mat = mat
        self.n, self.m, self.u = n, m, u
        self.p = n + m
        self.xvals = xvals
        self.k = (max(xvals) + 1) if xvals else 0
        self.budget = budget
        self.succ = np.full(u, -1, dtype=np.int64)
        self.full = (1 << (u + 1)) - 1
        self.cache: dict[int, int] = {}
        self.options: list[tuple[bool, int]] | None = None
        self.first_check = max(self.k - 1, 0)

    # types of many tuples at once ------------------------------------------------

    def _codes(self, vals: np.ndarray) -> np.ndarray:
        """One integer per row encoding its type (see ``_decode``)."""
        p = self.p
        sv = self.succ[vals]
        wide = (p * (p + 2)) ** p >= 2 ** 62
        code = np.zeros(len(vals), dtype=object if wide else np.int64)
        for i in range(p):
            first = np.full(len(vals), i, dtype=np.int64)
            tgt = np.where(sv[:, i] >= 0, p, p + 1)
            for j in range(p - 1, -1, -1):
                if j < i:
                    first = np.where(vals[:, j] == vals[:, i], j, first)
                tgt = np.where(sv[:, i] == vals[:, j], j, tgt)
            code = code * p + first
            code = code * (p + 2) + tgt
        return code

    def _decode(self, code: int):
        p = self.p
        first = [0] * p
        tgt = [0] * p
        for i in range(p - 1, -1, -1):
            code, tgt[i] = divmod(code, p + 2)
            code, first[i] = divmod(code, p)
        cls = []
        rep = []
        for i in range(p):
            if first[i] == i:
                cls.append(len(rep))
                rep.append(i)
            else:
                cls.append(cls[first[i]])
        succ = []
        for r in rep:
            t = tgt[r]
            succ.append(NONE if t == p + 1 else OTHER if t == p else cls[t])
        return tuple(cls), tuple(succ)

    def _mask_of_code(self, code: int) -> int:
        r = self.cache.get(code)
        if r is None:
            cls, succ = self._decode(code)
            r = self.mat.heap_mask(self.u, cls, succ)
            self.cache[code] = r
        return r

    def _tuples(self, loc: int) -> np.ndarray:
        """Universal assignments over 0..loc: all of them at the first
        check, afterwards only those that mention ``loc``."""
        m = self.m
        if loc == self.first_check:
            grid = _grid((loc + 1,) * m)
        else:
            parts = []
            for j in range(m):
                # j is the first coordinate equal to loc
                shape = (loc,) * j + (loc + 1,) * (m - 1 - j)
                rest = _grid(shape)
                parts.append(np.insert(rest, j, loc, axis=1))
            grid = np.concatenate(parts)
        xs = np.broadcast_to(np.asarray(self.xvals, dtype=np.int64), (len(grid), self.n))
        return np.concatenate([xs, grid.astype(np.int64)], axis=1)

    def _mask_at(self, loc: int) -> int:
        vals = self._tuples(loc)
        if self.budget.spend(len(vals)):
            raise _OutOfBudget
        g = self.full
        for code in np.unique(self._codes(vals)).tolist():
            g &= self._mask_of_code(code)
            if not g:
                break
        return g

    # the untouched locations ----------------------------------------------------

    def _untouched_options(self) -> list[tuple[bool, int]]:
        """(allocated?, heap-size mask) per possible cell of an untouched
        location, judged on assignments over the store locations and it."""
        k, u = self.k, self.u
        me = k
        xs_succ = []
        for loc in range(k):
            t = int(self.succ[loc])
            xs_succ.append(NONE if t < 0 else t if t < k else OTHER)
        choices = [NONE] + list(range(k)) + [me] + ([OTHER] if u >= k + 2 else [])
        out = []
        for ch in choices:
            g = self.full
            for ys in product(range(k + 1), repeat=self.m):
                if me not in ys:
                    continue
                vals = list(self.xvals) + list(ys)
                g &= self._mask_virtual(vals, xs_succ, ch)
                if not g:
                    break
            out.append((ch != NONE, g))
        return out

    def _mask_virtual(self, vals, xs_succ, me_succ) -> int:
        k = self.k
        first: dict[int, int] = {}
        cls = []
        for v in vals:
            if v not in first:
                first[v] = len(first)
            cls.append(first[v])
        succ = []
        for loc in first:
            t = me_succ if loc == k else xs_succ[loc]
            if t in (NONE, OTHER):
                succ.append(t)
            else:
                succ.append(first.get(t, OTHER))
        return self.mat.heap_mask(self.u, tuple(cls), tuple(succ))

    # depth-first search -----------------------------------------------------------

    def run(self) -> bool:
        return self._dfs(0, self.k, 0, self.full)

    def _feasible(self, g: int, lo: int, hi: int) -> bool:
        if lo > hi:
            return False
        window = ((1 << (hi - lo + 1)) - 1) << lo
        return bool(g & window)

    def _dfs(self, loc: int, top: int, alloc: int, g: int) -> bool:
        u = self.u
        if loc == u:
            return bool(g >> alloc & 1)
        if self.budget.spend():
            raise _OutOfBudget
        touched = max(top, loc + 1)
        choices = [-1] + list(range(touched)) + ([touched] if touched < u else [])
        for t in choices:
            self.succ[loc] = t
            a2 = alloc + (t >= 0)
            top2 = touched + (t == touched)
            g2 = g
            if loc == self.first_check or (loc > self.first_check and self.m):
                g2 &= self._mask_at(loc)
            rest = u - 1 - loc
            lo, hi = a2, a2 + rest
            if loc >= self.first_check and top2 < u:
                if loc == self.first_check or self.options is None:
                    self.options = self._untouched_options()
                live = [(al, msk) for al, msk in self.options if msk & g2]
                if not live:
                    continue
                union = 0
                for _, msk in live:
                    union |= msk
                g2 &= union
                z = u - top2
                if not any(not al for al, _ in live):
                    lo += z
                if not any(al for al, _ in live):
                    hi -= z
            if not self._feasible(g2, lo, hi):
                continue
            if self._dfs(loc + 1, top2, a2, g2):
                return True
        self.succ[loc] = -1
        return False


def check_finite_sat(phi: Formula, *, bound: int | None = None, max_work: int | None = None) -> SatResult:
    """Decide finite satisfiability of a closed ∃*∀* sentence.

    Sat comes with a witness of least universe size.  Unsat means no
    structure up to the small-model bound satisfies the sentence.  When
    ``max_work`` is exhausted first the answer is UNKNOWN.
    """
    n, m, _ = _bsr(phi)
    prefix, matrix = standardize_prenex(phi)
    xs = [v for q, v in prefix if q == "E"]
    ys = [v for q, v in prefix if q == "A"]
    limit = small_model_bound(phi) if bound is None else bound
    mat = Matrix(matrix, xs + ys)
    budget = _Budget(max_work)
    start = time.perf_counter()
    complete = 0
    try:
        for u in range(1, limit + 1):
            for xvals in _partitions(n, u):
                search = _Search(mat, n, m, u, xvals, budget)
                if search.run():
                    heap = {loc: int(t) for loc, t in enumerate(search.succ.tolist()) if t >= 0}
                    witness = SLStructure.of_size(u, dict(zip(xs, xvals)), heap)
                    checked = check_witness(phi, witness)
                    slack = u - len(elems(witness.h))
                    if is_domain_independent(matrix) and u > 1:
                        assert slack <= n + m, "least model leaves too many free locations"
                    return SatResult(Status.SAT, witness, limit, {
                        "visited": budget.used, "universe": u,
                        "checked_by": checked, "seconds": time.perf_counter() - start})
            complete = u
    except _OutOfBudget:
        return SatResult(Status.UNKNOWN, None, limit, {
            "visited": budget.used, "complete_up_to": complete,
            "seconds": time.perf_counter() - start}, "work limit reached")
    return SatResult(Status.UNSAT, None, limit, {
        "visited": budget.used, "complete_up_to": complete, "seconds": time.perf_counter() - start})


def check_infinite_sat(phi: Formula, *, max_work: int | None = None) -> SatResult:
    """Satisfiability over an infinite universe, through φ ∧ λ_m."""
    if not is_closed(phi):
        raise NotBSR(f"formula has free variables {sorted(free_vars(phi))}")
    try:
        reduced = infinite_to_finite(phi)
    except TranslationError as e:
        raise NotBSR(str(e)) from None
    if bsr_shape(reduced) is None:
        return SatResult(Status.UNKNOWN, None, 0, {}, "the reduced sentence is not exists* forall*")
    res = check_finite_sat(reduced, max_work=max_work)
    note = "inflatable: the witness stays a model when fresh isolated locations are added" if res.sat else res.note
    return SatResult(res.status, res.witness, res.bound_used, {**res.stats, "reduced": str(reduced)}, note)


# -- the oracle ------------------------------------------------------------------------


def _lnh_heaps(u: int) -> Iterator[dict[int, int]]:
    """Heaps on {0..u-1} up to renaming: a cell either is undefined, points
    to an already mentioned location, or to the least unmentioned one."""
    cells = [None] * u

    def go(loc: int, seen: int):
        if loc == u:
            yield {a: b for a, b in enumerate(cells) if b is not None}
            return
        seen = max(seen, loc + 1)
        for t in [None] + list(range(min(seen + 1, u))):
            cells[loc] = t
            yield from go(loc + 1, max(seen, (t + 1) if t is not None else 0))
        cells[loc] = None

    yield from go(0, 0)


def _sl_heaps(u: int, has_store: bool) -> Iterator[dict[int, int]]:
    if u <= 4 or has_store:
        for row in product(range(-1, u), repeat=u):
            yield {a: b for a, b in enumerate(row) if b >= 0}
    else:
        yield from _lnh_heaps(u)


def _spatial_quantifier(phi: Formula) -> bool:
    for s in subformulas(phi):
        if isinstance(s, (Star, Wand)) and not is_quantifier_free(s):
            return True
    return False


def oracle_sat(phi: Formula, dialect: str = "SL", max_universe: int = 4, *,
               max_work: int | None = None, preds: tuple[str, ...] = ()) -> SatResult:
    """Bounded search for a model; never answers UNSAT.

    Structures are tried in order of universe size.  Free variables are
    treated existentially.  Up to three locations SL sentences are judged
    by the literal evaluator, beyond that through heap types.
    """
    if max_universe < 1:
        raise ValueError("max_universe must be at least 1")
    names = sorted(free_vars(phi))
    work = 0
    complete = 0
    start = time.perf_counter()
    for u in range(1, max_universe + 1):
        for store in canonical_stores(u, names):
            if dialect == "SL":
                candidates = (SLStructure.of_size(u, store, h) for h in _sl_heaps(u, bool(names)))
            else:
                candidates = _fo_structures(u, store, sorted(set(preds) | _pred_names(phi)))
            for i in candidates:
                work += u ** len(split_prefix(phi)[0]) or 1
                if max_work is not None and work > max_work:
                    return SatResult(Status.UNKNOWN, None, max_universe, {
                        "visited": work, "complete_up_to": complete,
                        "seconds": time.perf_counter() - start}, "work limit reached")
                if dialect == "SL":
                    ok = eval_sl(i, phi) if u <= 3 or _spatial_quantifier(phi) else fast_eval_sl(i, phi)
                else:
                    ok = eval_fo(i, phi)
                if ok:
                    return SatResult(Status.SAT, i, max_universe, {
                        "visited": work, "universe": u, "seconds": time.perf_counter() - start})
        complete = u
    return SatResult(Status.UNKNOWN, None, max_universe, {
        "visited": work, "complete_up_to": complete, "seconds": time.perf_counter() - start},
        "no model up to the bound")


def _pred_names(phi: Formula) -> set[str]:
    from .formula import Pred

    return {s.name for s in subformulas(phi) if isinstance(s, Pred)}


def _fo_structures(u: int, store: dict, preds: list[str]) -> Iterator[FOStructure]:
    uni = frozenset(range(u))
    subsets = [frozenset(loc for loc in range(u) if bits >> loc & 1) for bits in range(1 << u)]
    for fn in product(range(u), repeat=u):
        for exts in product(subsets, repeat=len(preds)):
            yield FOStructure(uni, store, dict(enumerate(fn)), dict(zip(preds, exts)))
