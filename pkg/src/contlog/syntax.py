"""Formulas, structures and sequents: ASTs, parser, printer, translations.

ASCII surface syntax (keywords are reserved; atoms are other lowercase
identifiers):

    formulas    0  1  d(3/4)  a  2 f  h f  j* f  j f  al f  bx f  ! f
                f + g   f - g   f x g   f /\\ g   f \\/ g
    structures  eps  eps(3/4)  o2 s  b2 s  oa s  ba s  ~ s  s, s
    sequents    s |- f   (one-sided)   s |- s   (involutive)

`~` is structure-level negation; `!` applied to a bare formula is formula
negation, while `!` applied to a compound structure negates the structure
(the two-negation system distinguishes `~` from structural `!`).
Precedence: unary > + - x (left assoc) > /\\ > \\/ > ','.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dyadic import Dyadic, NotDyadicError

FORMULA_UNARY = {"2": "double", "h": "half", "j*": "jstar", "j": "jmap",
                 "al": "alpha", "bx": "beta", "!": "neg"}
FORMULA_BINARY = {"+": "oplus", "-": "ominus", "x": "odot",
                  "/\\": "meet", "\\/": "join"}
STRUCT_UNARY = {"o2": "o2", "b2": "b2", "oa": "oa", "ba": "ba",
                "~": "sim", "!": "sneg"}
KEYWORDS = {"x", "h", "j", "al", "bx", "o2", "b2", "oa", "ba", "eps"}

INVOLUTIVE_SYSTEMS = {"ingl", "inmgl", "incflew", "inljk"}
ONE_SIDED_SYSTEMS = {"gl", "mgl", "cflew", "ljk"}
SYSTEM_NAMES = INVOLUTIVE_SYSTEMS | ONE_SIDED_SYSTEMS

_UN_PRINT = {v: k for k, v in FORMULA_UNARY.items()}
_BIN_PRINT = {v: k for k, v in FORMULA_BINARY.items()}
_SUN_PRINT = {"o2": "o2", "b2": "b2", "oa": "oa", "ba": "ba",
              "sim": "~", "sneg": "!"}


class SyntaxError_(ValueError):
    def __init__(self, message, pos=None):
        self.pos = pos
        super().__init__(message if pos is None
                         else f"{message} (at column {pos + 1})")


class IllegalConnective(SyntaxError_):
    pass


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class FAtom(Formula):
    name: str


@dataclass(frozen=True)
class FConst(Formula):
    value: Dyadic


@dataclass(frozen=True)
class FUn(Formula):
    op: str
    arg: Formula


@dataclass(frozen=True)
class FBin(Formula):
    op: str
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Structure:
    pass


@dataclass(frozen=True)
class SLeaf(Structure):
    formula: Formula


@dataclass(frozen=True)
class SEps(Structure):
    value: Dyadic


@dataclass(frozen=True)
class SUn(Structure):
    op: str
    arg: Structure


@dataclass(frozen=True)
class SComma(Structure):
    left: Structure
    right: Structure


@dataclass(frozen=True)
class Sequent:
    lhs: Structure
    rhs: object  # Formula for one-sided systems, Structure for involutive
    system: str


EPS = SEps(Dyadic(0))
ZERO_F = FConst(Dyadic(0))
ONE_F = FConst(Dyadic(1))


# ---------------------------------------------------------------- printing

_PREC_OR, _PREC_AND, _PREC_ADD, _PREC_UN = 0, 1, 2, 3


def _fprint(f: Formula, prec: int) -> str:
    if isinstance(f, FAtom):
        return f.name
    if isinstance(f, FConst):
        if f.value == Dyadic(0):
            return "0"
        if f.value == Dyadic(1):
            return "1"
        return f"d({f.value})"
    if isinstance(f, FUn):
        body = f"{_UN_PRINT[f.op]} {_fprint(f.arg, _PREC_UN)}"
        return body if prec <= _PREC_UN else f"({body})"
    if isinstance(f, FBin):
        if f.op in ("oplus", "ominus", "odot"):
            mine = _PREC_ADD
            body = (f"{_fprint(f.left, mine)} {_BIN_PRINT[f.op]} "
                    f"{_fprint(f.right, mine + 1)}")
        elif f.op == "meet":
            mine = _PREC_AND
            body = (f"{_fprint(f.left, mine)} /\\ {_fprint(f.right, mine + 1)}")
        else:
            mine = _PREC_OR
            body = (f"{_fprint(f.left, mine)} \\/ {_fprint(f.right, mine + 1)}")
        return body if prec <= mine else f"({body})"
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    return _fprint(f, 0)


def _sprint(s: Structure, bare_comma: bool) -> str:
    if isinstance(s, SLeaf):
        return _fprint(s.formula, 1)
    if isinstance(s, SEps):
        return "eps" if s.value == Dyadic(0) else f"eps({s.value})"
    if isinstance(s, SUn):
        return f"{_SUN_PRINT[s.op]} {_sprint(s.arg, False)}"
    if isinstance(s, SComma):
        body = f"{_sprint(s.left, True)}, {_sprint(s.right, False)}"
        return body if bare_comma else f"({body})"
    raise TypeError(f"not a structure: {s!r}")


def print_structure(s: Structure) -> str:
    return _sprint(s, True)


def print_sequent(seq: Sequent) -> str:
    rhs = (print_structure(seq.rhs) if isinstance(seq.rhs, Structure)
           else print_formula(seq.rhs))
    return f"{print_structure(seq.lhs)} |- {rhs}"


# --------------------------------------------------------------- tokenizer

import re

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<turnstile>\|-)|(?P<and>/\\)|(?P<or>\\/)|(?P<jstar>j\*)"
    r"|(?P<word>[a-z][a-z0-9_]*)|(?P<num>[0-9]+)"
    r"|(?P<punct>[(),+\-!~/^]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise SyntaxError_(f"unexpected character {text[pos]!r}", pos)
            break
        pos = m.end()
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "turnstile":
            tokens.append(("|-", m.start(kind)))
        elif kind == "and":
            tokens.append(("/\\", m.start(kind)))
        elif kind == "or":
            tokens.append(("\\/", m.start(kind)))
        elif kind == "jstar":
            tokens.append(("j*", m.start(kind)))
        elif kind == "word":
            tokens.append((val, m.start(kind)))
        elif kind == "num":
            tokens.append((("NUM", val), m.start(kind)))
        else:
            tokens.append((val, m.start(kind)))
    tokens.append(("EOF", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, system: str | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.system = system
        self.involutive = system in INVOLUTIVE_SYSTEMS if system else True

    def peek(self):
        return self.tokens[self.i][0]

    def pos(self):
        return self.tokens[self.i][1]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok[0]

    def expect(self, tok):
        if self.peek() != tok:
            raise SyntaxError_(f"expected {tok!r}, found {self._show()}",
                               self.pos())
        return self.next()

    def _show(self):
        t = self.peek()
        return f"number {t[1]}" if isinstance(t, tuple) else repr(t)

    def _check_involutive(self, what):
        if not self.involutive:
            raise IllegalConnective(
                f"{what} is only legal in involutive systems", self.pos())

    # dyadics

    def parse_dyadic(self) -> Dyadic:
        tok = self.peek()
        if not isinstance(tok, tuple):
            raise SyntaxError_(f"expected a dyadic, found {self._show()}",
                               self.pos())
        start = self.pos()
        num = int(self.next()[1])
        if self.peek() != "/":
            return self._mk_dyadic(num, 1, start)
        self.next()
        den_tok = self.peek()
        if not isinstance(den_tok, tuple):
            raise SyntaxError_("expected a denominator", self.pos())
        den = int(self.next()[1])
        if self.peek() == "^":
            if den != 2:
                raise SyntaxError_("exponent form must be k/2^n", start)
            self.next()
            exp_tok = self.peek()
            if not isinstance(exp_tok, tuple):
                raise SyntaxError_("expected an exponent", self.pos())
            den = 2 ** int(self.next()[1])
        return self._mk_dyadic(num, den, start)

    def _mk_dyadic(self, num, den, pos) -> Dyadic:
        try:
            d = Dyadic(num, den)
        except NotDyadicError as e:
            raise SyntaxError_(str(e), pos) from None
        if not d.in_unit():
            raise SyntaxError_(f"dyadic {d} outside [0, 1]", pos)
        return d

    # formulas

    def parse_formula(self) -> Formula:
        return self._formula_or()

    def _formula_or(self) -> Formula:
        f = self._formula_and()
        while self.peek() == "\\/":
            self.next()
            f = FBin("join", f, self._formula_and())
        return f

    def _formula_and(self) -> Formula:
        f = self._formula_add()
        while self.peek() == "/\\":
            self.next()
            f = FBin("meet", f, self._formula_add())
        return f

    def _formula_add(self) -> Formula:
        f = self._formula_un()
        while self.peek() in ("+", "-", "x"):
            op = self.next()
            if op == "x":
                self._check_involutive("x")
            f = FBin(FORMULA_BINARY[op], f, self._formula_un())
        return f

    def _formula_un(self) -> Formula:
        tok = self.peek()
        if isinstance(tok, tuple) and tok[1] == "2":
            self.next()
            return FUn("double", self._formula_un())
        if tok in ("h", "j*", "j", "al", "bx"):
            self.next()
            return FUn(FORMULA_UNARY[tok], self._formula_un())
        if tok == "!":
            self._check_involutive("!")
            self.next()
            return FUn("neg", self._formula_un())
        return self._formula_atom()

    def _formula_atom(self) -> Formula:
        tok = self.peek()
        if isinstance(tok, tuple):
            if tok[1] == "0":
                self.next()
                return ZERO_F
            if tok[1] == "1":
                self.next()
                return ONE_F
            raise SyntaxError_(f"unexpected number {tok[1]}", self.pos())
        if tok == "d" and self.tokens[self.i + 1][0] == "(":
            self.next()
            self.expect("(")
            d = self.parse_dyadic()
            self.expect(")")
            return FConst(d)
        if tok == "(":
            self.next()
            f = self.parse_formula()
            self.expect(")")
            return f
        if isinstance(tok, str) and re.fullmatch(r"[a-z][a-z0-9_]*", tok) \
                and tok not in KEYWORDS:
            self.next()
            return FAtom(tok)
        raise SyntaxError_(f"expected a formula, found {self._show()}",
                           self.pos())

    # structures

    def parse_structure(self) -> Structure:
        s = self._struct_item()
        while self.peek() == ",":
            self.next()
            s = SComma(s, self._struct_item())
        return s

    def _struct_item(self) -> Structure:
        tok = self.peek()
        if tok in ("o2", "b2", "oa", "ba"):
            if tok == "ba":
                self._check_involutive("ba")
            self.next()
            return SUn(STRUCT_UNARY[tok], self._struct_item())
        if tok == "~":
            self._check_involutive("~")
            self.next()
            return SUn("sim", self._struct_item())
        if tok == "!":
            self._check_involutive("!")
            self.next()
            nxt = self.peek()
            if nxt in ("o2", "b2", "oa", "ba", "~", "!", "eps", "("):
                inner = self._struct_item()
                if isinstance(inner, SLeaf):
                    return self._continue_formula(FUn("neg", inner.formula))
                return SUn("sneg", inner)
            return self._continue_formula(FUn("neg", self._formula_un()))
        if tok == "eps":
            self.next()
            if self.peek() == "(":
                self.next()
                d = self.parse_dyadic()
                self.expect(")")
                return SEps(d)
            return EPS
        if tok == "(":
            self.next()
            s = self.parse_structure()
            self.expect(")")
            if self.peek() in ("+", "-", "x", "/\\", "\\/"):
                f = self._struct_as_formula(s)
                return self._continue_formula(f)
            return s
        return SLeaf(self.parse_formula())

    def _struct_as_formula(self, s: Structure) -> Formula:
        if isinstance(s, SLeaf):
            return s.formula
        if isinstance(s, SUn) and s.op == "sneg":
            return FUn("neg", self._struct_as_formula(s.arg))
        raise SyntaxError_("a compound structure cannot continue as a formula",
                           self.pos())

    def _continue_formula(self, left: Formula) -> Structure:
        # resume binary formula parsing after a parenthesized or negated item
        f = left
        while self.peek() in ("+", "-", "x"):
            op = self.next()
            if op == "x":
                self._check_involutive("x")
            f = FBin(FORMULA_BINARY[op], f, self._formula_un())
        while self.peek() == "/\\":
            self.next()
            f = FBin("meet", f, self._formula_add())
        while self.peek() == "\\/":
            self.next()
            f = FBin("join", f, self._formula_and())
        return SLeaf(f)

    def parse_sequent(self) -> Sequent:
        lhs = self.parse_structure()
        self.expect("|-")
        if self.system in ONE_SIDED_SYSTEMS:
            rhs = self.parse_formula()
        else:
            rhs = self.parse_structure()
            if self.system is None and isinstance(rhs, SLeaf):
                rhs = rhs.formula
        self.expect("EOF")
        return Sequent(lhs, rhs, self.system or "")


def parse(text: str, system: str | None = None):
    """Parse a sequent (with `|-`), a structure, or a formula."""
    if system is not None and system not in SYSTEM_NAMES:
        raise SyntaxError_(f"unknown system {system!r}")
    p = _Parser(text, system)
    if any(t[0] == "|-" for t in p.tokens):
        return p.parse_sequent()
    s = p.parse_structure()
    p.expect("EOF")
    if isinstance(s, SLeaf):
        return s.formula
    return s


def parse_sequent(text: str, system: str | None = None) -> Sequent:
    out = parse(text, system)
    if not isinstance(out, Sequent):
        raise SyntaxError_("expected a sequent with |-")
    return out


# ------------------------------------------------------------- expansions

def expand_dyadic_formula(d: Dyadic) -> Formula:
    """d as a sum of 2^n d copies of alpha^{n-1}(j*(0)), n >= 1 minimal."""
    if not d.in_unit():
        raise SyntaxError_(f"dyadic {d} outside [0, 1]")
    n = max(d.exponent, 1)
    count = d.numerator << (n - d.exponent)
    if count == 0:
        return ZERO_F
    unit = FUn("jstar", ZERO_F)
    for _ in range(n - 1):
        unit = FUn("alpha", unit)
    out = unit
    for _ in range(count - 1):
        out = FBin("oplus", out, unit)
    return out


def expand_eps(d: Dyadic) -> Structure:
    """eps_d: k copies of oa^{n-1} b2 eps for d = k/2^n with k odd;
    eps_0 is eps and eps_1 is the pair eps(1/2), eps(1/2)."""
    if not d.in_unit():
        raise SyntaxError_(f"dyadic {d} outside [0, 1]")
    if d == Dyadic(0):
        return EPS
    if d == Dyadic(1):
        half = expand_eps(Dyadic(1, 2))
        return SComma(half, half)
    item = SUn("b2", EPS)
    for _ in range(d.exponent - 1):
        item = SUn("oa", item)
    out = item
    for _ in range(d.numerator - 1):
        out = SComma(out, item)
    return out


# ------------------------------------------------- involutive normal form

def involutive_normal_form(s: Structure, identify: bool = False) -> Structure:
    """Push structure negations to the leaves using the sequent-space
    relations (mixed double negations cancel; commas reverse and negate
    their parts; modalities pass marks through).  With `identify`, the two
    negations are the same symbol and any double negation cancels."""
    return _nf(s, 0, identify)


def _nf(s: Structure, e: int, identify: bool) -> Structure:
    # e is the net negation count: with two distinct negations, sim and
    # sneg are mutually inverse, so a mark word reduces to a signed power
    # (positive: sim, negative: sneg); identified negations reduce mod 2.
    if identify:
        e = e % 2
    if isinstance(s, SUn) and s.op in ("sim", "sneg"):
        return _nf(s.arg, e + (1 if s.op == "sim" else -1), identify)
    if isinstance(s, SComma):
        left = _nf(s.left, e, identify)
        right = _nf(s.right, e, identify)
        if e % 2:
            return SComma(right, left)
        return SComma(left, right)
    if isinstance(s, SUn):
        return SUn(s.op, _nf(s.arg, e, identify))
    if isinstance(s, SEps):
        return s
    mark = "sim" if e > 0 else "sneg"
    if identify:
        mark = "sneg"
    out = s
    for _ in range(abs(e)):
        out = SUn(mark, out)
    return out


# ------------------------------------------------------------ translation

_LEFT_UNARY = {"o2": "double", "b2": "jstar", "oa": "alpha", "ba": "alpha",
               "sim": "neg", "sneg": "neg"}
_RIGHT_UNARY = {"o2": "half", "b2": "jmap", "oa": "beta", "ba": "beta",
                "sim": "neg", "sneg": "neg"}


def struct_to_formula(s: Structure, side: str, system: str | None = None) -> Formula:
    """The algebraic reading of a structure.

    Left: `,` is +, eps is 0, eps_d is d, o2/b2/oa read as 2/j*/al.
    Right (involutive): `,` is x, eps is 1, o2/b2/oa read as h/j/bx.
    Structures from involutive systems are normalized first, so negation
    marks sit on leaves and read as formula negation.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if system in INVOLUTIVE_SYSTEMS or system is None:
        s = involutive_normal_form(
            s, identify=system in INVOLUTIVE_SYSTEMS - {"inmgl"})
    return _translate(s, side)


def _translate(s: Structure, side: str) -> Formula:
    if isinstance(s, SLeaf):
        return s.formula
    if isinstance(s, SEps):
        if side == "left":
            return FConst(s.value)
        return FUn("neg", FConst(s.value))
    if isinstance(s, SComma):
        op = "oplus" if side == "left" else "odot"
        return FBin(op, _translate(s.left, side), _translate(s.right, side))
    if isinstance(s, SUn):
        if s.op in ("sim", "sneg"):
            if not isinstance(s.arg, (SLeaf, SEps)):
                raise SyntaxError_("negation not in normal form")
            return FUn("neg", _translate(s.arg, side))
        table = _LEFT_UNARY if side == "left" else _RIGHT_UNARY
        return FUn(table[s.op], _translate(s.arg, side))
    raise TypeError(f"not a structure: {s!r}")
