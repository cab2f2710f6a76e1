"""Text syntax for both dialects.

Precedence, loosest first: ``<->``, ``->`` (right associative), ``|``,
``&``, ``*``, ``-*`` (right associative), ``!``.  Binders extend as far to
the right as possible.  ``#`` starts a comment that runs to the end of the
line.  Unicode spellings of the connectives are accepted on input; output is
always ASCII.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    App, Alloc, And, Bottom, Emp, Eq, Exists, Forall, Formula, FUNC, HeapGe,
    HeapGeUnivMinus, Hooks, Iff, Implies, Not, Or, PointsTo, Pred, Star, Term,
    TermEq, Top, UnivGe, Var, Wand,
)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


_SYMBOLS = [
    ("<->", "IFF"), ("↔", "IFF"), ("|->", "PTO"), ("↦", "PTO"), ("~>", "HOOK"),
    ("↪", "HOOK"), ("-*", "WAND"), ("−∗", "WAND"), ("-∗", "WAND"), ("->", "IMP"),
    ("→", "IMP"), ("|h|", "HSIZE"), ("|U|", "USIZE"), (">=", "GE"), ("≥", "GE"),
    ("!=", "NEQ"), ("≠", "NEQ"), ("≉", "NEQ"), ("=", "EQ"), ("≈", "EQ"),
    ("&", "AND"), ("∧", "AND"), ("|", "OR"), ("∨", "OR"), ("*", "STAR"),
    ("∗", "STAR"), ("!", "NOT"), ("~", "NOT"), ("¬", "NOT"), ("(", "LP"),
    (")", "RP"), (".", "DOT"), (",", "COMMA"), ("-", "MINUS"), ("−", "MINUS"),
    ("∃", "EXISTS"), ("∀", "FORALL"), ("⊤", "TRUE"), ("⊥", "FALSE"),
]
_KEYWORDS = {
    "emp": "EMP", "true": "TRUE", "false": "FALSE", "alloc": "ALLOC",
    "exists": "EXISTS", "forall": "FORALL",
}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NAT = re.compile(r"[0-9]+")


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group()
            toks.append(Token(_KEYWORDS.get(word, "ID"), word, line, col))
        else:
            m = _NAT.match(text, i)
            if m:
                toks.append(Token("NAT", m.group(), line, col))
            else:
                for sym, kind in _SYMBOLS:
                    if text.startswith(sym, i):
                        toks.append(Token(kind, sym, line, col))
                        i += len(sym)
                        col += len(sym)
                        break
                else:
                    raise ParseError(f"unexpected character {c!r}", line, col)
                continue
        i += len(m.group())
        col += len(m.group())
    toks.append(Token("EOF", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, dialect: str):
        if dialect not in ("SL", "FO"):
            raise ValueError(f"unknown dialect {dialect!r}")
        self.toks = tokenize(text)
        self.pos = 0
        self.dialect = dialect

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def take(self, kind: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            self.error(f"expected {kind.lower()}, found {found!r}")
        t = self.tok
        self.pos += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.pos += 1
            return True
        return False

    def parse(self) -> Formula:
        if self.tok.kind == "EOF":
            self.error("empty formula")
        phi = self.formula()
        if self.tok.kind != "EOF":
            self.error(f"unexpected {self.tok.text!r}")
        return phi

    # loosest level: binders or iff
    def formula(self) -> Formula:
        if self.tok.kind in ("EXISTS", "FORALL"):
            return self.binder()
        left = self.implication()
        while self.tok.kind == "IFF":
            self.pos += 1
            left = Iff(left, self.right_operand(self.implication))
        return left

    def right_operand(self, level):
        # a binder may close a chain of binary operators: a & exists x. b
        if self.tok.kind in ("EXISTS", "FORALL"):
            return self.binder()
        return level()

    def binder(self) -> Formula:
        kind = self.tok.kind
        self.pos += 1
        names = [self.variable()]
        while self.accept("COMMA") or self.tok.kind == "ID":
            names.append(self.variable())
        self.take("DOT")
        body = self.formula()
        ctor = Exists if kind == "EXISTS" else Forall
        for v in reversed(names):
            body = ctor(v, body)
        return body

    def variable(self) -> str:
        t = self.take("ID")
        if self.dialect == "FO" and t.text == FUNC:
            self.error(f"{FUNC!r} is the function symbol, not a variable", t)
        return t.text

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.tok.kind == "IMP":
            self.pos += 1
            return Implies(left, self.right_operand(self.implication))
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.tok.kind == "OR":
            self.pos += 1
            left = Or(left, self.right_operand(self.conjunction))
        return left

    def conjunction(self) -> Formula:
        left = self.star()
        while self.tok.kind == "AND":
            self.pos += 1
            left = And(left, self.right_operand(self.star))
        return left

    def star(self) -> Formula:
        left = self.wand()
        while self.tok.kind == "STAR":
            self.spatial_only()
            self.pos += 1
            left = Star(left, self.right_operand(self.wand))
        return left

    def wand(self) -> Formula:
        left = self.unary()
        if self.tok.kind == "WAND":
            self.spatial_only()
            self.pos += 1
            return Wand(left, self.right_operand(self.wand))
        return left

    def spatial_only(self):
        if self.dialect != "SL":
            self.error(f"{self.tok.text!r} is not a first-order connective")

    def unary(self) -> Formula:
        if self.accept("NOT"):
            return Not(self.right_operand(self.unary))
        if self.tok.kind == "LP":
            self.pos += 1
            phi = self.formula()
            self.take("RP")
            return phi
        if self.tok.kind in ("EXISTS", "FORALL"):
            return self.binder()
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if self.accept("TRUE"):
            return Top()
        if self.accept("FALSE"):
            return Bottom()
        if self.dialect == "SL":
            return self.sl_atom(t)
        return self.fo_atom(t)

    def sl_atom(self, t: Token) -> Formula:
        if self.accept("EMP"):
            return Emp()
        if self.accept("ALLOC"):
            self.take("LP")
            v = self.variable()
            self.take("RP")
            return Alloc(v)
        if self.accept("HSIZE"):
            self.take("GE")
            if self.accept("USIZE"):
                self.take("MINUS")
                return HeapGeUnivMinus(self.nat())
            return HeapGe(self.nat())
        if self.accept("USIZE"):
            self.take("GE")
            return UnivGe(self.nat())
        if t.kind == "ID":
            if self.peek().kind == "LP":
                self.error(f"unknown atom {t.text!r}")
            x = self.variable()
            op = self.tok
            if op.kind not in ("EQ", "NEQ", "PTO", "HOOK"):
                self.error(f"expected '=', '|->' or '~>' after {x!r}")
            self.pos += 1
            y = self.variable()
            if op.kind == "EQ":
                return Eq(x, y)
            if op.kind == "NEQ":
                return Not(Eq(x, y))
            return PointsTo(x, y) if op.kind == "PTO" else Hooks(x, y)
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def nat(self) -> int:
        return int(self.take("NAT").text)

    def fo_atom(self, t: Token) -> Formula:
        if t.kind != "ID":
            self.error(f"unexpected {t.text or 'end of input'!r}")
        if t.text != FUNC and self.peek().kind == "LP":
            # predicate application
            self.pos += 2
            arg = self.term()
            if self.tok.kind == "COMMA":
                self.error(f"predicate {t.text!r} is unary")
            self.take("RP")
            return Pred(t.text, arg)
        left = self.term()
        if self.tok.kind not in ("EQ", "NEQ"):
            self.error("expected '=' after term")
        neg = self.tok.kind == "NEQ"
        self.pos += 1
        right = self.term()
        return Not(TermEq(left, right)) if neg else TermEq(left, right)

    def term(self) -> Term:
        t = self.tok
        if t.kind == "ID" and t.text == FUNC:
            self.pos += 1
            if self.tok.kind != "LP":
                self.error(f"{FUNC!r} must be applied to exactly one argument", t)
            self.pos += 1
            arg = self.term()
            if self.tok.kind == "COMMA":
                self.error(f"{FUNC!r} must be applied to exactly one argument")
            self.take("RP")
            return App(arg)
        if t.kind == "ID":
            if self.peek().kind == "LP":
                self.error(f"unknown function symbol {t.text!r}", t)
            self.pos += 1
            return Var(t.text)
        self.error(f"expected a term, found {t.text or 'end of input'!r}")


def parse(text: str, dialect: str = "SL") -> Formula:
    """Parse ``text`` as an SL(1) or FO formula."""
    return _Parser(text, dialect).parse()


# -- printing ------------------------------------------------------------------

_BIN = {Iff: ("<->", 1), Implies: ("->", 2), Or: ("|", 3), And: ("&", 4), Star: ("*", 5), Wand: ("-*", 6)}
_RIGHT_ASSOC = (Implies, Wand)
_ATOM_PREC = 8


def to_text(phi: Formula) -> str:
    """Canonical ASCII rendering; ``parse(to_text(phi))`` returns phi."""
    return _show(phi)


def _prec(phi: Formula) -> int:
    if isinstance(phi, (Exists, Forall)):
        return 0
    op = _BIN.get(type(phi))
    if op:
        return op[1]
    if isinstance(phi, Not):
        return 7
    return _ATOM_PREC


def _wrap(phi: Formula, need: int) -> str:
    s = _show(phi)
    return f"({s})" if _prec(phi) < need else s


def _show(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Emp):
        return "emp"
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, PointsTo):
        return f"{phi.src} |-> {phi.dst}"
    if isinstance(phi, Hooks):
        return f"{phi.src} ~> {phi.dst}"
    if isinstance(phi, Alloc):
        return f"alloc({phi.var})"
    if isinstance(phi, HeapGe):
        return f"|h| >= {phi.n}"
    if isinstance(phi, UnivGe):
        return f"|U| >= {phi.n}"
    if isinstance(phi, HeapGeUnivMinus):
        return f"|h| >= |U| - {phi.n}"
    if isinstance(phi, TermEq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Pred):
        return f"{phi.name}({phi.arg})"
    if isinstance(phi, Not):
        return "!" + _wrap(phi.arg, 7)
    if isinstance(phi, (Exists, Forall)):
        kw = "exists" if isinstance(phi, Exists) else "forall"
        return f"{kw} {phi.var}. {_show(phi.body)}"
    op = _BIN.get(type(phi))
    if op is None:
        raise TypeError(f"not a formula: {phi!r}")
    sym, p = op
    if isinstance(phi, _RIGHT_ASSOC):
        lneed, rneed = p + 1, p
    else:
        lneed, rneed = p, p + 1
    return f"{_wrap(phi.left, lneed)} {sym} {_wrap(phi.right, rneed)}"
