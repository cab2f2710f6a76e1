"""Translations between SL(1) and first-order logic with one unary function.

* ``lambda_formula(p)`` says that at least ``p`` locations lie outside
  dom(h) ∪ img(h); ``infinite_to_finite`` conjoins it to move satisfiability
  over infinite universes to finite ones.
* ``sl_to_fo`` maps quantified test combinations to FO over ``f`` and the
  heap-domain predicate ``d``.
* ``fo_to_sl`` goes the other way, for finite or for infinite SL models.
* ``emit_fo`` writes FO formulae as SMT-LIB2, TPTP or the native syntax.
"""
from __future__ import annotations

from .formula import (
    Alloc, And, App, BINDERS, Bottom, DOMAIN_PRED, Emp, Eq, Exists, Forall,
    Formula, HeapGe, HeapGeUnivMinus, Hooks, Iff, Implies, Not, Or, PointsTo,
    Pred, Star, TermEq, Top, UnivGe, Var, Wand, all_vars, conj, distinct,
    exists, forall, free_vars, fresh_names, is_quantifier_free, split_prefix,
    standardize_prenex, subformulas, term_depth,
)
from .testform import NotATestCombination, desugar_spatial_atoms, normalize_for_infinite


class TranslationError(ValueError):
    """The input is outside the shape a translation accepts."""


def _numbered(stem: str, count: int, avoid) -> list[str]:
    """``stem1 .. stemN``, skipping names already used in the formula."""
    out = []
    for name in fresh_names(avoid, stem):
        if len(out) == count:
            break
        out.append(name)
    return out


# -- lambda_p and the infinite case ------------------------------------------------


def lambda_formula(p: int, avoid=()) -> Formula:
    """∃x1..xp ∀y0 y1. distinct(x1..xp) ∧ ⋀i ¬(y0 ~> y1 ∧ (xi = y0 ∨ xi = y1)).

    True exactly when at least p locations are neither allocated nor
    pointed to.  Bound names avoid ``avoid``.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    if p == 0:
        return Top()
    avoid = set(avoid)
    xs = _numbered("x", p, avoid)
    y0, y1 = _numbered("y", 2, avoid | set(xs))
    outside = conj(Not(And(Hooks(y0, y1), Or(Eq(x, y0), Eq(x, y1)))) for x in xs)
    body = outside if p == 1 else And(distinct(xs), outside)
    return exists(xs, forall([y0, y1], body))


def infinite_to_finite(phi: Formula) -> Formula:
    """φ ∧ λ_m in prenex form, m the number of quantifiers of φ.

    ``emp`` and ``x |-> y`` are first rewritten into test atoms and the
    universe-size atoms are evaluated as on an infinite universe.  The
    result has a finite model exactly when φ has an infinite one.  λ's
    existential block goes first and its universal block last, so an
    ∃*∀* input stays ∃*∀*.
    """
    if free_vars(phi):
        raise TranslationError(f"formula has free variables {sorted(free_vars(phi))}")
    prefix, matrix = split_prefix(phi)
    if not is_quantifier_free(matrix):
        raise TranslationError("formula is not prenex")
    try:
        matrix = normalize_for_infinite(desugar_spatial_atoms(matrix))
    except NotATestCombination as e:
        raise TranslationError(str(e)) from None
    prefix, matrix = standardize_prenex(_rebuild(prefix, matrix))
    lam = lambda_formula(len(prefix), avoid=all_vars(phi) | {v for _, v in prefix})
    lam_prefix, lam_matrix = split_prefix(lam)
    ex = [v for q, v in lam_prefix if q == "E"]
    al = [v for q, v in lam_prefix if q == "A"]
    body = _rebuild([("A", v) for v in al], And(matrix, lam_matrix))
    return exists(ex, _rebuild(prefix, body))


def _rebuild(prefix, matrix: Formula) -> Formula:
    for q, v in reversed(prefix):
        matrix = (Exists if q == "E" else Forall)(v, matrix)
    return matrix


# -- SL -> FO ----------------------------------------------------------------------


def sl_to_fo(phi: Formula) -> Formula:
    """Translate a quantified boolean combination of test atoms to FO.

    ``x ~> y`` becomes ``d(x) & y = f(x)``, ``alloc(x)`` becomes ``d(x)``
    and the cardinality atoms become counting formulae over ``d``.
    """
    for s in subformulas(phi):
        if isinstance(s, (Star, Wand, PointsTo, Emp)):
            raise TranslationError(f"not a test combination: {s}")
    avoid = all_vars(phi)
    return _to_fo(phi, avoid)


def _d(v: str) -> Pred:
    return Pred(DOMAIN_PRED, Var(v))


def _veq(a: str, b: str) -> TermEq:
    return TermEq(Var(a), Var(b))


def _to_fo(phi: Formula, avoid) -> Formula:
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Eq):
        return _veq(phi.left, phi.right)
    if isinstance(phi, Hooks):
        return And(_d(phi.src), TermEq(Var(phi.dst), App(Var(phi.src))))
    if isinstance(phi, Alloc):
        return _d(phi.var)
    if isinstance(phi, UnivGe):
        xs = _numbered("x", phi.n, avoid)
        return exists(xs, distinct(xs, _veq))
    if isinstance(phi, HeapGe):
        xs = _numbered("x", phi.n, avoid)
        return exists(xs, conj([distinct(xs, _veq)] + [_d(x) for x in xs]))
    if isinstance(phi, HeapGeUnivMinus):
        xs = _numbered("x", phi.n, avoid)
        (y,) = _numbered("y", 1, set(avoid) | set(xs))
        guard = conj(Not(_veq(y, x)) for x in xs)
        body = _d(y) if not xs else Implies(guard, _d(y))
        return exists(xs, Forall(y, body))
    if isinstance(phi, Not):
        return Not(_to_fo(phi.arg, avoid))
    if isinstance(phi, (And, Or, Implies, Iff)):
        return type(phi)(_to_fo(phi.left, avoid), _to_fo(phi.right, avoid))
    if isinstance(phi, BINDERS):
        return type(phi)(phi.var, _to_fo(phi.body, avoid))
    raise TranslationError(f"not a test combination: {phi}")


# -- FO -> SL ----------------------------------------------------------------------


def fo_to_sl(phi: Formula, mode: str = "finite") -> Formula:
    """Translate a flat FO formula over ``f`` and equality to SL(1).

    Both modes read ``f(x) = y`` as ``x ~> y``.  ``finite`` adds that the
    heap is total; ``infinite`` instead keeps the FO model inside dom(h):
    the heap is nonempty and closed, free variables are allocated and
    every quantifier ranges over allocated locations.
    """
    if mode not in ("finite", "infinite"):
        raise ValueError(f"unknown mode {mode!r}")
    for s in subformulas(phi):
        if isinstance(s, Pred):
            raise TranslationError(f"predicate symbols are not supported: {s}")
        if isinstance(s, TermEq) and _flat_equation(s) is None:
            raise TranslationError(f"equation is not flat: {s}")
        if not isinstance(s, (TermEq, Eq, Not, And, Or, Implies, Iff, Top, Bottom) + BINDERS):
            raise TranslationError(f"not a first-order formula: {s}")
    relativize = mode == "infinite"
    body = _to_sl(phi, relativize)
    if mode == "finite":
        return And(body, Forall("x", Alloc("x")))
    axioms = And(Not(Emp()), forall(["x", "y"], Implies(Hooks("x", "y"), Alloc("y"))))
    for v in sorted(free_vars(phi)):
        axioms = And(axioms, Alloc(v))
    return And(axioms, body)


def _flat_equation(s: TermEq):
    """('eq', a, b) for a = b, ('hook', x, y) for f(x) = y or y = f(x)."""
    left, right = s.left, s.right
    if isinstance(left, Var) and isinstance(right, Var):
        return "eq", left.name, right.name
    if isinstance(left, Var):
        left, right = right, left
    if isinstance(right, Var) and term_depth(left) == 1 and isinstance(left.arg, Var):
        return "hook", left.arg.name, right.name
    return None


def _to_sl(phi: Formula, relativize: bool) -> Formula:
    if isinstance(phi, TermEq):
        kind, a, b = _flat_equation(phi)
        return Eq(a, b) if kind == "eq" else Hooks(a, b)
    if isinstance(phi, (Eq, Top, Bottom)):
        return phi
    if isinstance(phi, Not):
        return Not(_to_sl(phi.arg, relativize))
    if isinstance(phi, (And, Or, Implies, Iff)):
        return type(phi)(_to_sl(phi.left, relativize), _to_sl(phi.right, relativize))
    body = _to_sl(phi.body, relativize)
    if not relativize:
        return type(phi)(phi.var, body)
    if isinstance(phi, Forall):
        return Forall(phi.var, Implies(Alloc(phi.var), body))
    return Exists(phi.var, And(Alloc(phi.var), body))


# -- emitters ----------------------------------------------------------------------


def emit_fo(phi: Formula, fmt: str = "native") -> str:
    """Render an FO formula as a complete input file."""
    if fmt == "native":
        return f"{phi}\n"
    if fmt == "smtlib2":
        return _smtlib(phi)
    if fmt == "tptp":
        return _tptp(phi)
    raise ValueError(f"unknown format {fmt!r}")


def _predicates(phi: Formula) -> list[str]:
    return sorted({s.name for s in subformulas(phi) if isinstance(s, Pred)})


def _smt_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    return f"({t.fn} {_smt_term(t.arg)})"


def _smt(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, TermEq):
        return f"(= {_smt_term(phi.left)} {_smt_term(phi.right)})"
    if isinstance(phi, Eq):
        return f"(= {phi.left} {phi.right})"
    if isinstance(phi, Pred):
        return f"({phi.name} {_smt_term(phi.arg)})"
    if isinstance(phi, Not):
        return f"(not {_smt(phi.arg)})"
    if isinstance(phi, (And, Or, Implies, Iff)):
        op = {And: "and", Or: "or", Implies: "=>", Iff: "="}[type(phi)]
        return f"({op} {_smt(phi.left)} {_smt(phi.right)})"
    if isinstance(phi, BINDERS):
        q = "exists" if isinstance(phi, Exists) else "forall"
        return f"({q} (({phi.var} L)) {_smt(phi.body)})"
    raise TranslationError(f"not a first-order formula: {phi}")


def _smtlib(phi: Formula) -> str:
    lines = ["(declare-sort L 0)", "(declare-fun f (L) L)"]
    lines += [f"(declare-fun {p} (L) Bool)" for p in _predicates(phi)]
    lines += [f"(declare-const {v} L)" for v in sorted(free_vars(phi))]
    lines += [f"(assert {_smt(phi)})", "(check-sat)"]
    return "\n".join(lines) + "\n"


def _tptp_names(phi: Formula) -> dict[str, str]:
    """Variables become capitalized TPTP variables, kept distinct."""
    out: dict[str, str] = {}
    used: set[str] = set()
    for v in sorted(all_vars(phi)):
        base = "".join(c if c.isalnum() else "_" for c in v)
        base = base[0].upper() + base[1:]
        name, k = base, 1
        while name in used:
            k += 1
            name = f"{base}_{k}"
        used.add(name)
        out[v] = name
    return out


def _tptp(phi: Formula) -> str:
    names = _tptp_names(phi)

    def term(t) -> str:
        if isinstance(t, Var):
            return names[t.name]
        return f"{t.fn}({term(t.arg)})"

    def go(p: Formula) -> str:
        if isinstance(p, Top):
            return "$true"
        if isinstance(p, Bottom):
            return "$false"
        if isinstance(p, TermEq):
            return f"{term(p.left)} = {term(p.right)}"
        if isinstance(p, Eq):
            return f"{names[p.left]} = {names[p.right]}"
        if isinstance(p, Pred):
            return f"{p.name}({term(p.arg)})"
        if isinstance(p, Not):
            return f"~ ({go(p.arg)})"
        if isinstance(p, (And, Or, Implies, Iff)):
            op = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}[type(p)]
            return f"({go(p.left)} {op} {go(p.right)})"
        if isinstance(p, BINDERS):
            q = "?" if isinstance(p, Exists) else "!"
            return f"{q} [{names[p.var]}] : ({go(p.body)})"
        raise TranslationError(f"not a first-order formula: {p}")

    closed = exists(sorted(free_vars(phi)), phi)
    return f"fof(formula, axiom, {go(closed)}).\n"

