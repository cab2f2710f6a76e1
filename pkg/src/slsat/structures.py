"""Finite SL and FO structures, their text format and canonical enumeration."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping

from .formula import DOMAIN_PRED


def _items(m: Mapping | Iterable) -> tuple:
    pairs = m.items() if isinstance(m, Mapping) else m
    return tuple(sorted(pairs))


@dataclass(frozen=True)
class SLStructure:
    """Universe, store and heap.  Locations are non-negative integers."""

    universe: frozenset[int]
    store: tuple[tuple[str, int], ...] = ()
    heap: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(self, "store", _items(self.store))
        object.__setattr__(self, "heap", _items(self.heap))
        if not self.universe:
            raise ValueError("the universe must not be empty")
        for v, loc in self.store:
            if loc not in self.universe:
                raise ValueError(f"store maps {v} outside the universe")
        seen = set()
        for a, b in self.heap:
            if a in seen:
                raise ValueError(f"location {a} allocated twice")
            seen.add(a)
            if a not in self.universe or b not in self.universe:
                raise ValueError(f"heap cell {a}->{b} leaves the universe")

    @classmethod
    def of_size(cls, size: int, store: Mapping[str, int] | None = None,
                heap: Mapping[int, int] | None = None) -> "SLStructure":
        return cls(frozenset(range(size)), _items(store or {}), _items(heap or {}))

    @cached_property
    def s(self) -> dict[str, int]:
        return dict(self.store)

    @cached_property
    def h(self) -> dict[int, int]:
        return dict(self.heap)

    @property
    def size(self) -> int:
        return len(self.universe)

    def dom(self) -> frozenset[int]:
        return frozenset(self.h)

    def img(self) -> frozenset[int]:
        return frozenset(self.h.values())

    def with_store(self, store: Mapping[str, int]) -> "SLStructure":
        return SLStructure(self.universe, _items(store), self.heap)

    def with_heap(self, heap: Mapping[int, int]) -> "SLStructure":
        return SLStructure(self.universe, self.store, _items(heap))

    def __str__(self) -> str:
        return format_structure(self)


@dataclass(frozen=True)
class FOStructure:
    """Universe, store, total interpretation of ``f`` and unary predicates."""

    universe: frozenset[int]
    store: tuple[tuple[str, int], ...] = ()
    fn: tuple[tuple[int, int], ...] = ()
    preds: tuple[tuple[str, frozenset[int]], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(self, "store", _items(self.store))
        object.__setattr__(self, "fn", _items(self.fn))
        preds = self.preds.items() if isinstance(self.preds, Mapping) else self.preds
        object.__setattr__(self, "preds", tuple(sorted((k, frozenset(v)) for k, v in preds)))
        if not self.universe:
            raise ValueError("the universe must not be empty")
        f = dict(self.fn)
        if set(f) != set(self.universe) or not set(f.values()) <= self.universe:
            raise ValueError("f must be a total map on the universe")
        for name, ext in self.preds:
            if not ext <= self.universe:
                raise ValueError(f"predicate {name} leaves the universe")
        for v, loc in self.store:
            if loc not in self.universe:
                raise ValueError(f"store maps {v} outside the universe")

    @cached_property
    def s(self) -> dict[str, int]:
        return dict(self.store)

    @cached_property
    def f(self) -> dict[int, int]:
        return dict(self.fn)

    @cached_property
    def p(self) -> dict[str, frozenset[int]]:
        return dict(self.preds)

    def __str__(self) -> str:
        return format_fo_structure(self)


def elems(heap: Mapping[int, int]) -> frozenset[int]:
    """dom(heap) ∪ img(heap)."""
    return frozenset(heap) | frozenset(heap.values())


def equivalent(a: SLStructure, b: SLStructure, xs: Iterable[str], n: int) -> bool:
    """Whether two structures are (X, n)-equivalent.

    1. the heaps coincide; 2. X-variables are equal in a exactly when they
    are equal in b; 3. an X-variable stored inside elems(h) in either
    structure has the same value in both; 4. both universes keep at least
    n + |X| locations outside elems(h).
    """
    xs = sorted(set(xs))
    for x in xs:
        if x not in a.s or x not in b.s:
            raise KeyError(f"store undefined on {x}")
    if a.h != b.h:
        return False
    sa, sb = a.s, b.s
    for i, x in enumerate(xs):
        for y in xs[i + 1:]:
            if (sa[x] == sa[y]) != (sb[x] == sb[y]):
                return False
    el = elems(a.h)
    for x in xs:
        if (sa[x] in el or sb[x] in el) and sa[x] != sb[x]:
            return False
    need = n + len(xs)
    return len(a.universe - el) >= need and len(b.universe - el) >= need


def default_location(universe: Iterable[int]) -> int:
    return min(universe)


def corresponds(i: SLStructure) -> FOStructure:
    """FO structure with d = dom(h) and f agreeing with h on dom(h).

    Off the heap domain f sends every location to the least location (0 for
    the usual universes {0..u-1}).
    """
    dflt = default_location(i.universe)
    h = i.h
    fn = {loc: h.get(loc, dflt) for loc in i.universe}
    return FOStructure(i.universe, i.store, fn, {DOMAIN_PRED: frozenset(h)})


def heap_of(m: FOStructure, pred: str = DOMAIN_PRED) -> SLStructure:
    """The SL structure that corresponds to m: f restricted to ``pred``."""
    dom = m.p.get(pred, frozenset())
    return SLStructure(m.universe, m.store, {loc: m.f[loc] for loc in sorted(dom)})


# -- enumeration -----------------------------------------------------------


def canonical_stores(size: int, names: list[str]) -> Iterator[dict[str, int]]:
    """Stores whose values appear in first-use order (0, then <= 1 + max)."""

    def go(i: int, top: int, acc: list[int]):
        if i == len(names):
            yield dict(zip(names, acc))
            return
        for v in range(min(top + 2, size)):
            acc.append(v)
            yield from go(i + 1, max(top, v), acc)
            acc.pop()

    yield from go(0, -1, [])


def all_heaps(size: int) -> Iterator[dict[int, int]]:
    """Every partial map on {0..size-1}, in lexicographic order of the
    sequence (h(0), ..., h(size-1)) with "undefined" first."""
    for row in product(range(-1, size), repeat=size):
        yield {loc: t for loc, t in enumerate(row) if t >= 0}


def enumerate_structures(size: int, names: list[str] | tuple[str, ...] = ()) -> Iterator[SLStructure]:
    if size < 1:
        raise ValueError("universe size must be at least 1")
    names = list(names)
    uni = frozenset(range(size))
    for store in canonical_stores(size, names):
        st = _items(store)
        for heap in all_heaps(size):
            yield SLStructure(uni, st, _items(heap))


# -- text format -------------------------------------------------------------

_LINE = re.compile(r"^\s*(\w+)\b(.*)$")


class StructureFormatError(ValueError):
    pass


def _universe_text(universe: frozenset[int]) -> str:
    if universe == frozenset(range(len(universe))):
        return str(len(universe))
    return "{" + ",".join(map(str, sorted(universe))) + "}"


def format_structure(i: SLStructure) -> str:
    lines = [f"universe {_universe_text(i.universe)}"]
    lines.append("store" + "".join(f" {v}={loc}" for v, loc in i.store))
    lines.append("heap" + "".join(f" {a}->{b}" for a, b in i.heap))
    return "\n".join(lines) + "\n"


def format_fo_structure(m: FOStructure) -> str:
    lines = [f"universe {_universe_text(m.universe)}"]
    lines.append("store" + "".join(f" {v}={loc}" for v, loc in m.store))
    lines.append("f" + "".join(f" {a}->{b}" for a, b in m.fn))
    for name, ext in m.preds:
        lines.append(f"pred {name}" + "".join(f" {loc}" for loc in sorted(ext)))
    return "\n".join(lines) + "\n"


def _parse_universe(rest: str) -> frozenset[int]:
    rest = rest.strip()
    if rest.startswith("{"):
        if not rest.endswith("}"):
            raise StructureFormatError("unterminated universe set")
        body = rest[1:-1].replace(",", " ").split()
        return frozenset(int(t) for t in body)
    if not rest.isdigit():
        raise StructureFormatError(f"bad universe {rest!r}")
    return frozenset(range(int(rest)))


def _parse_pairs(rest: str, sep: str, key=int) -> list[tuple]:
    out = []
    # tolerate spaces around the separator
    toks = re.sub(rf"\s*{re.escape(sep)}\s*", sep, rest.strip()).split()
    for t in toks:
        if sep not in t:
            raise StructureFormatError(f"expected a{sep}b, found {t!r}")
        a, b = t.split(sep, 1)
        out.append((key(a), int(b)))
    return out


def _sections(text: str) -> dict[str, list[str]]:
    sec: dict[str, list[str]] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if not m:
            raise StructureFormatError(f"cannot read line {raw!r}")
        sec.setdefault(m.group(1), []).append(m.group(2))
    return sec


def parse_structure(text: str) -> SLStructure:
    """Read the ``universe / store / heap`` format."""
    sec = _sections(text)
    unknown = set(sec) - {"universe", "store", "heap"}
    if unknown:
        raise StructureFormatError(f"unknown section {sorted(unknown)[0]!r}")
    if "universe" not in sec:
        raise StructureFormatError("missing universe line")
    try:
        uni = _parse_universe(" ".join(sec["universe"]))
        store = _parse_pairs(" ".join(sec.get("store", [])), "=", key=str)
        heap = _parse_pairs(" ".join(sec.get("heap", [])), "->")
        return SLStructure(uni, store, heap)
    except ValueError as e:
        raise StructureFormatError(str(e)) from None


def parse_fo_structure(text: str) -> FOStructure:
    sec = _sections(text)
    if "universe" not in sec:
        raise StructureFormatError("missing universe line")
    try:
        uni = _parse_universe(" ".join(sec["universe"]))
        store = _parse_pairs(" ".join(sec.get("store", [])), "=", key=str)
        fn = _parse_pairs(" ".join(sec.get("f", [])), "->")
        preds = {}
        for rest in sec.get("pred", []):
            parts = rest.split()
            preds[parts[0]] = frozenset(int(t) for t in parts[1:])
        return FOStructure(uni, store, fn, preds)
    except (ValueError, IndexError) as e:
        raise StructureFormatError(str(e)) from None
