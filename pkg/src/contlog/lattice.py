"""Finite commutative integral residuated lattices, given by tables.

A lattice is built either from one of the builtin families or from a raw
description (elements, order pairs, full fusion table); validation checks
every defining property exhaustively and derives the residual table.
Validated lattices are immutable and safe to share.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .dyadic import Dyadic


class LatticeError(ValueError):
    pass


class NotLattice(LatticeError):
    pass


class NotCommutative(LatticeError):
    pass


class NotAssociative(LatticeError):
    pass


class NotIntegral(LatticeError):
    pass


class NotMonotone(LatticeError):
    pass


class MissingResidual(LatticeError):
    pass


class ResidualMismatch(LatticeError):
    pass


class LatticeFormatError(LatticeError):
    pass


class LatticeClassification:
    def __init__(self, is_locale: bool, is_involutive: bool):
        self.is_locale = is_locale
        self.is_involutive = is_involutive
        self.is_boolean = is_locale and is_involutive

    def __repr__(self):
        return (f"LatticeClassification(locale={self.is_locale}, "
                f"involutive={self.is_involutive}, boolean={self.is_boolean})")


class FinitePoset:
    """A finite poset: elements plus a reflexive antisymmetric transitive leq."""

    def __init__(self, elements, pairs):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise LatticeFormatError("duplicate element ids")
        self._idx = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        rel = [[False] * n for _ in range(n)]
        for i in range(n):
            rel[i][i] = True
        for a, b in pairs:
            rel[self._index(a)][self._index(b)] = True
        # transitive closure
        for k in range(n):
            rk = rel[k]
            for i in range(n):
                if rel[i][k]:
                    ri = rel[i]
                    for j in range(n):
                        if rk[j]:
                            ri[j] = True
        for i in range(n):
            for j in range(n):
                if i != j and rel[i][j] and rel[j][i]:
                    raise NotLattice(
                        f"order is not antisymmetric: {self.elements[i]} and "
                        f"{self.elements[j]} are equivalent")
        self._leq = rel

    def _index(self, e) -> int:
        try:
            return self._idx[e]
        except KeyError:
            raise LatticeFormatError(f"unknown element {e!r}") from None

    def leq(self, a, b) -> bool:
        return self._leq[self._index(a)][self._index(b)]


class FiniteLattice(FinitePoset):
    """A finite lattice (order part only: meets/joins, bottom/top)."""

    def __init__(self, elements, pairs):
        super().__init__(elements, pairs)
        n = len(self.elements)
        self._meet = [[None] * n for _ in range(n)]
        self._join = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                m = self._bound(i, j, lower=True)
                jn = self._bound(i, j, lower=False)
                if m is None or jn is None:
                    kind = "meet" if m is None else "join"
                    raise NotLattice(
                        f"no {kind} for {self.elements[i]} and {self.elements[j]}")
                self._meet[i][j] = m
                self._join[i][j] = jn
        bot = [i for i in range(n) if all(self._leq[i][j] for j in range(n))]
        top = [i for i in range(n) if all(self._leq[j][i] for j in range(n))]
        if not bot or not top:
            raise NotLattice("missing bottom or top element")
        self._bot, self._top = bot[0], top[0]
        self._finalize_order()

    def _finalize_order(self):
        """Flat id-keyed tables; these sit on the step-function hot path."""
        els = self.elements
        self._leq_flat = {(els[i], els[j])
                          for i in range(len(els)) for j in range(len(els))
                          if self._leq[i][j]}
        self._meet_flat = {(a, b): els[self._meet[i][j]]
                           for i, a in enumerate(els) for j, b in enumerate(els)}
        self._join_flat = {(a, b): els[self._join[i][j]]
                           for i, a in enumerate(els) for j, b in enumerate(els)}

    def _bound(self, i, j, lower: bool):
        n = len(self.elements)
        if lower:
            cands = [k for k in range(n) if self._leq[k][i] and self._leq[k][j]]
            best = [k for k in cands
                    if all(self._leq[c][k] for c in cands)]
        else:
            cands = [k for k in range(n) if self._leq[i][k] and self._leq[j][k]]
            best = [k for k in cands
                    if all(self._leq[k][c] for c in cands)]
        return best[0] if best else None

    @property
    def bottom(self):
        return self.elements[self._bot]

    @property
    def top(self):
        return self.elements[self._top]

    def leq(self, a, b) -> bool:
        if (a, b) in self._leq_flat:
            return True
        self._index(a), self._index(b)
        return False

    def meet(self, a, b):
        return self._meet_flat[(a, b)]

    def join(self, a, b):
        return self._join_flat[(a, b)]

    def meet_all(self, xs):
        out = self.top
        for x in xs:
            out = self.meet(out, x)
        return out

    def join_all(self, xs):
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def strict_uppers(self, a):
        return [b for b in self.elements if b != a and self.leq(a, b)]


class FiniteResiduatedLattice(FiniteLattice):
    """A finite commutative integral residuated complete lattice.

    The residual is always recomputed from the fusion table during
    validation; a supplied residual table is checked against it and any
    mismatch is an error.
    """

    def __init__(self, name, elements, pairs, otimes, residual=None):
        super().__init__(elements, pairs)
        self.name = name
        n = len(self.elements)
        self._otimes = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                try:
                    val = otimes[(self.elements[i], self.elements[j])]
                except KeyError:
                    raise LatticeFormatError(
                        f"otimes table missing entry for "
                        f"({self.elements[i]}, {self.elements[j]})") from None
                self._otimes[i][j] = self._index(val)
        self._check_monoid()
        self._residual = self._derive_residual()
        els = self.elements
        self._ot_flat = {(a, b): els[self._otimes[i][j]]
                         for i, a in enumerate(els) for j, b in enumerate(els)}
        self._res_flat = {(a, b): els[self._residual[i][j]]
                          for i, a in enumerate(els) for j, b in enumerate(els)}
        if residual is not None:
            for (a, b), c in residual.items():
                if self.residual(a, b) != c:
                    raise ResidualMismatch(
                        f"supplied residual({a}, {b}) = {c}, "
                        f"derived {self.residual(a, b)}")

    def _check_monoid(self):
        n = len(self.elements)
        ot = self._otimes
        for i in range(n):
            for j in range(n):
                if ot[i][j] != ot[j][i]:
                    raise NotCommutative(
                        f"otimes({self.elements[i]}, {self.elements[j]}) != "
                        f"otimes({self.elements[j]}, {self.elements[i]})")
        for i in range(n):
            if ot[self._top][i] != i:
                raise NotIntegral(
                    f"top is not neutral: otimes(top, {self.elements[i]}) = "
                    f"{self.elements[ot[self._top][i]]}")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if ot[ot[i][j]][k] != ot[i][ot[j][k]]:
                        raise NotAssociative(
                            f"otimes not associative at ({self.elements[i]}, "
                            f"{self.elements[j]}, {self.elements[k]})")
                    if self._leq[i][j] and not self._leq[ot[i][k]][ot[j][k]]:
                        raise NotMonotone(
                            f"otimes not monotone: {self.elements[i]} <= "
                            f"{self.elements[j]} but otimes with "
                            f"{self.elements[k]} is not")

    def _derive_residual(self):
        n = len(self.elements)
        res = [[None] * n for _ in range(n)]
        for b in range(n):
            for c in range(n):
                cands = [a for a in range(n) if self._leq[self._otimes[a][b]][c]]
                best = [a for a in cands if all(self._leq[x][a] for x in cands)]
                if not best:
                    raise MissingResidual(
                        f"no greatest a with a * {self.elements[b]} <= "
                        f"{self.elements[c]}")
                res[b][c] = best[0]
        return res

    def otimes(self, a, b):
        return self._ot_flat[(a, b)]

    def residual(self, a, b):
        """The element a -> b, greatest x with x * a <= b."""
        return self._res_flat[(a, b)]

    def index_tables(self):
        """Index-level tables (leq, meet, join, otimes, residual) plus the
        element index map, for bulk table-driven computations."""
        return {
            "index": dict(self._idx),
            "leq": [row[:] for row in self._leq],
            "meet": [row[:] for row in self._meet],
            "join": [row[:] for row in self._join],
            "otimes": [row[:] for row in self._otimes],
            "residual": [row[:] for row in self._residual],
            "bottom": self._bot,
            "top": self._top,
        }

    def neg(self, a):
        return self.residual(a, self.bottom)

    def __repr__(self):
        return f"FiniteResiduatedLattice({self.name}, {len(self.elements)} elements)"


def _chain_names(n: int) -> list[str]:
    """Canonical chain ids: 0, 1, and reduced fractions; 1/2 prints as h."""
    names = []
    for k in range(n):
        f = Fraction(k, n - 1) if n > 1 else Fraction(1)
        if f == 0:
            names.append("0")
        elif f == 1:
            names.append("1")
        elif f == Fraction(1, 2):
            names.append("h")
        else:
            names.append(f"{f.numerator}/{f.denominator}")
    return names


def make_builtin(family: str, size: int) -> FiniteResiduatedLattice:
    """Builtin lattices: lukasiewicz_chain, godel_chain, boolean (by atom count)."""
    if family in ("lukasiewicz_chain", "godel_chain"):
        if size < 1:
            raise LatticeError("chain length must be >= 1")
        if size == 1:
            return _singleton(family)
        names = _chain_names(size)
        pairs = [(names[i], names[j]) for i in range(size) for j in range(i, size)]
        vals = [Fraction(k, size - 1) for k in range(size)]
        ot = {}
        for i in range(size):
            for j in range(size):
                if family == "lukasiewicz_chain":
                    v = max(vals[i] + vals[j] - 1, Fraction(0))
                else:
                    v = min(vals[i], vals[j])
                ot[(names[i], names[j])] = names[vals.index(v)]
        return FiniteResiduatedLattice(f"{family}:{size}", names, pairs, ot)
    if family == "boolean":
        if not 1 <= size <= 6:
            raise LatticeError("boolean atom count must be between 1 and 6")
        atoms = "abcdef"[:size]
        subsets = []
        for mask in range(2**size):
            s = frozenset(a for i, a in enumerate(atoms) if mask >> i & 1)
            subsets.append(s)

        def sname(s):
            if not s:
                return "0"
            if len(s) == size:
                return "1"
            return "".join(sorted(s))

        names = [sname(s) for s in subsets]
        pairs = [(sname(s), sname(t))
                 for s in subsets for t in subsets if s <= t]
        ot = {(sname(s), sname(t)): sname(s & t)
              for s in subsets for t in subsets}
        return FiniteResiduatedLattice(f"boolean:{size}", names, pairs, ot)
    raise LatticeError(f"unknown lattice family {family!r}")


def _singleton(family):
    return FiniteResiduatedLattice(
        f"{family}:1", ["0"], [("0", "0")], {("0", "0"): "0"})


def validate(name, elements, pairs, otimes, residual=None) -> FiniteResiduatedLattice:
    """Validate a raw lattice description; see FiniteResiduatedLattice."""
    return FiniteResiduatedLattice(name, elements, pairs, otimes, residual)


def classify(lat: FiniteResiduatedLattice) -> LatticeClassification:
    """Locale: x <= x*x for all x; involutive: neg(neg(x)) = x for all x."""
    locale = all(lat.leq(x, lat.otimes(x, x)) for x in lat.elements)
    involutive = all(lat.neg(lat.neg(x)) == x for x in lat.elements)
    return LatticeClassification(locale, involutive)


def parse_lattice_file(text: str) -> FiniteResiduatedLattice:
    """Line-oriented lattice format.

    Directives: `lattice <name>`, `elements <id>...`, `bottom <id>`,
    `top <id>`, `leq <a> <b>` (repeated), `otimes <a> <b> <c>` (repeated),
    `end`.  Comments start with `#`.  Unknown directives are errors.
    """
    name = None
    elements = None
    bottom = top = None
    pairs = []
    otimes = {}
    ended = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            raise LatticeFormatError(f"line {lineno}: content after end")
        words = line.split()
        key, args = words[0], words[1:]
        if key == "lattice":
            if len(args) != 1:
                raise LatticeFormatError(f"line {lineno}: lattice takes one name")
            name = args[0]
        elif key == "elements":
            elements = args
        elif key == "bottom":
            bottom = args[0]
        elif key == "top":
            top = args[0]
        elif key == "leq":
            if len(args) != 2:
                raise LatticeFormatError(f"line {lineno}: leq takes two elements")
            pairs.append((args[0], args[1]))
        elif key == "otimes":
            if len(args) != 3:
                raise LatticeFormatError(f"line {lineno}: otimes takes three elements")
            otimes[(args[0], args[1])] = args[2]
        elif key == "end":
            ended = True
        else:
            raise LatticeFormatError(f"line {lineno}: unknown directive {key!r}")
    if name is None or elements is None:
        raise LatticeFormatError("missing lattice name or elements")
    if not ended:
        raise LatticeFormatError("missing end directive")
    lat = validate(name, elements, pairs, otimes)
    if bottom is not None and lat.bottom != bottom:
        raise NotLattice(f"declared bottom {bottom} but least element is {lat.bottom}")
    if top is not None and lat.top != top:
        raise NotLattice(f"declared top {top} but greatest element is {lat.top}")
    return lat


def dm_completion(poset: FinitePoset):
    """Dedekind-MacNeille completion of a finite poset.

    Returns (completion lattice, embedding dict element -> completion id).
    Completion elements are the cuts A with A = lower(upper(A)), ordered
    by inclusion; ids are written `{a b ...}`.
    """
    els = poset.elements

    def upper(s):
        return frozenset(x for x in els if all(poset.leq(y, x) for y in s))

    def lower(s):
        return frozenset(x for x in els if all(poset.leq(x, y) for y in s))

    cuts = set()
    # every cut is lower(U) for some upper set U = upper(S); closing the
    # lower(upper(.)) images of all subsets would be exponential, but every
    # cut arises as an intersection of principal down-sets (plus the bottom
    # cut), so close under pairwise intersection instead.
    principal = [lower({e}) for e in els]
    cuts.add(lower(upper(frozenset())))
    for p in principal:
        cuts.add(p)
    changed = True
    while changed:
        changed = False
        for a, b in combinations(list(cuts), 2):
            c = a & b
            if c not in cuts and lower(upper(c)) == c:
                cuts.add(c)
                changed = True
        new = set()
        for a in list(cuts):
            for b in list(cuts):
                u = lower(upper(a | b))
                if u not in cuts:
                    new.add(u)
        if new:
            cuts |= new
            changed = True

    def cut_name(c):
        return "{" + " ".join(sorted(c)) + "}"

    ordered = sorted(cuts, key=lambda c: (len(c), cut_name(c)))
    names = [cut_name(c) for c in ordered]
    pairs = [(cut_name(a), cut_name(b))
             for a in ordered for b in ordered if a <= b]
    completion = FiniteLattice(names, pairs)
    embedding = {e: cut_name(lower({e})) for e in els}
    return completion, embedding
