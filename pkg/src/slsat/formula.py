"""Abstract syntax for SL(1) and for first-order logic over one unary function.

Both dialects share the boolean connectives and the binders; they differ in
their atoms.  SL atoms talk about variables only, FO atoms talk about terms
built from variables and the function symbol ``f``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Iterator, Union

FUNC = "f"
DOMAIN_PRED = "d"


class Formula:
    """Base class of every formula node (both dialects)."""

    __slots__ = ()

    def __str__(self) -> str:
        from .parser import to_text

        return to_text(self)


# -- shared nodes -----------------------------------------------------------


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self) -> str:
        return "Bottom()"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


# -- SL(1) atoms and spatial connectives ----------------------------------


@dataclass(frozen=True, repr=False)
class Emp(Formula):
    def __repr__(self) -> str:
        return "Emp()"


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class PointsTo(Formula):
    src: str
    dst: str


@dataclass(frozen=True)
class Hooks(Formula):
    """``x ~> y``: the heap maps s(x) to s(y), whatever else it contains."""

    src: str
    dst: str


@dataclass(frozen=True)
class Alloc(Formula):
    var: str


@dataclass(frozen=True)
class HeapGe(Formula):
    n: int


@dataclass(frozen=True)
class UnivGe(Formula):
    n: int


@dataclass(frozen=True)
class HeapGeUnivMinus(Formula):
    n: int


@dataclass(frozen=True)
class Star(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Wand(Formula):
    left: Formula
    right: Formula


# -- FO terms and atoms -----------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    arg: "Term"
    fn: str = FUNC

    def __str__(self) -> str:
        return f"{self.fn}({self.arg})"


Term = Union[Var, App]


@dataclass(frozen=True)
class TermEq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    arg: Term


CONSTANTS = (Top, Bottom)
BINARY = (And, Or, Implies, Iff, Star, Wand)
BINDERS = (Exists, Forall)
SL_ATOMS = (Emp, Eq, PointsTo, Hooks, Alloc, HeapGe, UnivGe, HeapGeUnivMinus)
TEST_ATOMS = (Eq, Hooks, Alloc, HeapGe, UnivGe, HeapGeUnivMinus)
FO_ATOMS = (TermEq, Pred)


# -- constructors -----------------------------------------------------------


def conj(parts) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    out: Formula | None = None
    for p in parts:
        out = p if out is None else And(out, p)
    return Top() if out is None else out


def disj(parts) -> Formula:
    out: Formula | None = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return Bottom() if out is None else out


def exists(names, body: Formula) -> Formula:
    for v in reversed(list(names)):
        body = Exists(v, body)
    return body


def forall(names, body: Formula) -> Formula:
    for v in reversed(list(names)):
        body = Forall(v, body)
    return body


def distinct(names, eq=None) -> Formula:
    """Pairwise disequality; over zero or one variable this is ``true``."""
    names = list(names)
    mk = eq or Eq
    return conj(Not(mk(a, b)) for i, a in enumerate(names) for b in names[i + 1:])


def term_eq(a: str, b: str) -> TermEq:
    return TermEq(Var(a), Var(b))


# -- traversal helpers --------------------------------------------------------


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, Not):
        return (phi.arg,)
    if isinstance(phi, BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, BINDERS):
        return (phi.body,)
    return ()


def subformulas(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(children(cur)))


def term_vars(t: Term) -> set[str]:
    while isinstance(t, App):
        t = t.arg
    return {t.name}


def term_depth(t: Term) -> int:
    d = 0
    while isinstance(t, App):
        d += 1
        t = t.arg
    return d


def atom_vars(phi: Formula) -> set[str]:
    if isinstance(phi, (Eq, PointsTo, Hooks)):
        return {phi.left, phi.right} if isinstance(phi, Eq) else {phi.src, phi.dst}
    if isinstance(phi, Alloc):
        return {phi.var}
    if isinstance(phi, TermEq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Pred):
        return term_vars(phi.arg)
    return set()


def all_vars(phi: Formula) -> set[str]:
    out: set[str] = set()
    for sub in subformulas(phi):
        out |= atom_vars(sub)
        if isinstance(sub, BINDERS):
            out.add(sub.var)
    return out


def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, BINDERS):
        return free_vars(phi.body) - {phi.var}
    kids = children(phi)
    if not kids:
        return frozenset(atom_vars(phi))
    out: frozenset[str] = frozenset()
    for k in kids:
        out |= free_vars(k)
    return out


def is_closed(phi: Formula) -> bool:
    return not free_vars(phi)


def is_quantifier_free(phi: Formula) -> bool:
    return not any(isinstance(s, BINDERS) for s in subformulas(phi))


def dialect_of(phi: Formula) -> str:
    """``"SL"``, ``"FO"`` or ``"any"`` when only shared nodes occur."""
    sl = fo = False
    for s in subformulas(phi):
        if isinstance(s, SL_ATOMS + (Star, Wand)):
            sl = True
        elif isinstance(s, FO_ATOMS):
            fo = True
    if sl and fo:
        raise ValueError("formula mixes SL and FO atoms")
    return "SL" if sl else "FO" if fo else "any"


def size_of(phi: Formula) -> int:
    """Number of symbol occurrences.

    Every connective, quantifier, variable occurrence, relation symbol,
    function symbol and keyword counts once; a numeric constant counts once.
    ``|h| >= |U| - n`` therefore has size 5.
    """
    if isinstance(phi, (Top, Bottom, Emp)):
        return 1
    if isinstance(phi, (Eq, PointsTo, Hooks)):
        return 3
    if isinstance(phi, Alloc):
        return 2
    if isinstance(phi, (HeapGe, UnivGe)):
        return 3
    if isinstance(phi, HeapGeUnivMinus):
        return 5
    if isinstance(phi, TermEq):
        return 1 + _term_size(phi.left) + _term_size(phi.right)
    if isinstance(phi, Pred):
        return 1 + _term_size(phi.arg)
    if isinstance(phi, Not):
        return 1 + size_of(phi.arg)
    if isinstance(phi, BINARY):
        return 1 + size_of(phi.left) + size_of(phi.right)
    if isinstance(phi, BINDERS):
        return 2 + size_of(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def _term_size(t: Term) -> int:
    return 1 + term_depth(t)


# -- quantifier prefixes ---------------------------------------------------


@dataclass(frozen=True)
class QuantifierFree:
    def __str__(self) -> str:
        return "quantifier-free"


@dataclass(frozen=True)
class BSR:
    n: int
    m: int

    def __str__(self) -> str:
        return f"BSR({self.n},{self.m})"


@dataclass(frozen=True)
class Prenex:
    prefix: str

    def __str__(self) -> str:
        return f"prenex {self.prefix}"


@dataclass(frozen=True)
class NonPrenex:
    def __str__(self) -> str:
        return "non-prenex"


PrefixClass = Union[QuantifierFree, BSR, Prenex, NonPrenex]


def split_prefix(phi: Formula) -> tuple[list[tuple[str, str]], Formula]:
    """Peel the outermost binders: ``([("E", x), ("A", y)], matrix)``."""
    prefix = []
    while isinstance(phi, BINDERS):
        prefix.append(("E" if isinstance(phi, Exists) else "A", phi.var))
        phi = phi.body
    return prefix, phi


def classify_prefix(phi: Formula) -> PrefixClass:
    prefix, matrix = split_prefix(phi)
    if not is_quantifier_free(matrix):
        return NonPrenex()
    if not prefix:
        return QuantifierFree()
    word = "".join(q for q, _ in prefix)
    n = len(word) - len(word.lstrip("E"))
    if word[n:] == "A" * (len(word) - n):
        return BSR(n, len(word) - n)
    return Prenex(word.replace("E", "∃").replace("A", "∀"))


def bsr_shape(phi: Formula) -> tuple[int, int] | None:
    """``(n, m)`` when phi is in the ∃*∀* fragment (quantifier-free counts)."""
    cls = classify_prefix(phi)
    if isinstance(cls, QuantifierFree):
        return 0, 0
    if isinstance(cls, BSR):
        return cls.n, cls.m
    return None


# -- renaming ---------------------------------------------------------------


def fresh_names(avoid, stem: str = "z") -> Iterator[str]:
    avoid = set(avoid)
    for i in count(1):
        name = f"{stem}{i}"
        if name not in avoid:
            yield name


def rename_free(phi: Formula, mapping: dict[str, str]) -> Formula:
    """Capture-avoiding renaming is not needed by callers: targets are fresh."""
    if not mapping:
        return phi
    if isinstance(phi, Eq):
        return Eq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, PointsTo):
        return PointsTo(mapping.get(phi.src, phi.src), mapping.get(phi.dst, phi.dst))
    if isinstance(phi, Hooks):
        return Hooks(mapping.get(phi.src, phi.src), mapping.get(phi.dst, phi.dst))
    if isinstance(phi, Alloc):
        return Alloc(mapping.get(phi.var, phi.var))
    if isinstance(phi, TermEq):
        return TermEq(_rename_term(phi.left, mapping), _rename_term(phi.right, mapping))
    if isinstance(phi, Pred):
        return Pred(phi.name, _rename_term(phi.arg, mapping))
    if isinstance(phi, Not):
        return Not(rename_free(phi.arg, mapping))
    if isinstance(phi, BINARY):
        return type(phi)(rename_free(phi.left, mapping), rename_free(phi.right, mapping))
    if isinstance(phi, BINDERS):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        return type(phi)(phi.var, rename_free(phi.body, inner))
    return phi


def _rename_term(t: Term, mapping: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    return App(_rename_term(t.arg, mapping), t.fn)


def standardize_prenex(phi: Formula):
    """Rename the binders of a prenex formula apart.

    Returns ``(prefix, matrix)``.  A binder shadowed by an inner binder of the
    same name binds nothing in the matrix, so it simply receives a fresh name.
    """
    prefix, matrix = split_prefix(phi)
    taken = all_vars(phi)
    seen: set[str] = set()
    names: list[tuple[str, str]] = []
    for q, v in reversed(prefix):
        if v in seen:
            v = next(fresh_names(taken, v + "_"))
            taken.add(v)
        seen.add(v)
        names.append((q, v))
    names.reverse()
    return names, matrix


# -- FO flattening -------------------------------------------------------------


def flatten_fo(phi: Formula) -> Formula:
    """Remove nested applications of ``f``.

    Afterwards every equation reads ``f(x) = y`` or ``x = y`` and every
    predicate is applied to a variable.  Subterms are named by fresh
    variables, bound existentially in positive positions and universally
    in negative ones; both readings are equivalent because ``f`` is total.
    """
    names = fresh_names(all_vars(phi), "z")
    return _flatten(phi, True, names)


def _flatten(phi: Formula, positive: bool, names) -> Formula:
    if isinstance(phi, (TermEq, Pred)):
        return _flatten_atom(phi, positive, names)
    if isinstance(phi, Not):
        return Not(_flatten(phi.arg, not positive, names))
    if isinstance(phi, Implies):
        return Implies(_flatten(phi.left, not positive, names), _flatten(phi.right, positive, names))
    if isinstance(phi, Iff):
        return Iff(_flatten(phi.left, positive, names), _flatten(phi.right, positive, names))
    if isinstance(phi, (And, Or)):
        return type(phi)(_flatten(phi.left, positive, names), _flatten(phi.right, positive, names))
    if isinstance(phi, BINDERS):
        return type(phi)(phi.var, _flatten(phi.body, positive, names))
    return phi


def _flatten_atom(phi: Formula, positive: bool, names) -> Formula:
    defs: list[tuple[str, TermEq]] = []

    def name(t: Term) -> str:
        if isinstance(t, Var):
            return t.name
        inner = name(t.arg)
        z = next(names)
        defs.append((z, TermEq(App(Var(inner), t.fn), Var(z))))
        return z

    def shallow(t: Term) -> Term:
        # keep at most one application on top of a variable
        if isinstance(t, App):
            return App(Var(name(t.arg)), t.fn)
        return t

    if isinstance(phi, Pred):
        core: Formula = Pred(phi.name, Var(name(phi.arg)))
    else:
        left, right = phi.left, phi.right
        if isinstance(left, Var) and isinstance(right, App):
            left, right = right, left
        if isinstance(right, App):
            core = TermEq(shallow(left), Var(name(right)))
        else:
            core = TermEq(shallow(left), right)
    if not defs:
        return core
    bound = [z for z, _ in defs]
    guard = conj(d for _, d in defs)
    if positive:
        return exists(bound, And(guard, core))
    return forall(bound, Implies(guard, core))


def is_flat_fo(phi: Formula) -> bool:
    for s in subformulas(phi):
        if isinstance(s, TermEq):
            if term_depth(s.right) > 0 or term_depth(s.left) > 1:
                return False
        elif isinstance(s, Pred):
            if term_depth(s.arg) > 0:
                return False
    return True
