"""Exact dyadic rationals and the unit-interval operations built on them.

All operations used by the step-function algebra (truncated sum and
difference, halving, truncated doubling, j, j*, alpha, beta) map dyadics
to dyadics, so everything here is exact; there is no rounding anywhere.
Values are raw (numerator, exponent) pairs in canonical form, compared by
bit shifts; these sit on the hot path of every lattice-valued operation.
"""

from __future__ import annotations

from fractions import Fraction


class NotDyadicError(ValueError):
    pass


class Dyadic:
    """A rational num/2^exp with num odd or zero (and exp 0 when num is 0)."""

    __slots__ = ("num", "exp")

    def __init__(self, numerator: int, denominator: int = 1):
        if denominator <= 0 or denominator & (denominator - 1):
            raise NotDyadicError(f"denominator {denominator} is not a power of two")
        exp = denominator.bit_length() - 1
        while exp > 0 and numerator % 2 == 0:
            numerator //= 2
            exp -= 1
        self.num = numerator
        self.exp = exp

    @classmethod
    def _raw(cls, num: int, exp: int) -> "Dyadic":
        d = object.__new__(cls)
        while exp > 0 and num % 2 == 0:
            num //= 2
            exp -= 1
        d.num = num
        d.exp = exp
        return d

    @property
    def numerator(self) -> int:
        return self.num

    @property
    def exponent(self) -> int:
        return self.exp

    @property
    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse `0`, `1`, `k/m` (m a power of two) or `k/2^n`."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            den = den.strip()
            if den.startswith("2^"):
                return cls(int(num), 2 ** int(den[2:]))
            return cls(int(num), int(den))
        return cls(int(text))

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{1 << self.exp}"

    def __repr__(self) -> str:
        return f"Dyadic({self})"

    def __hash__(self):
        return hash((self.num, self.exp))

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.num == other.num and self.exp == other.exp
        if isinstance(other, int):
            return self.exp == 0 and self.num == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, Dyadic):
            return (self.num << other.exp) < (other.num << self.exp)
        if isinstance(other, int):
            return self.num < (other << self.exp)
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, Dyadic):
            return (self.num << other.exp) <= (other.num << self.exp)
        if isinstance(other, int):
            return self.num <= (other << self.exp)
        return NotImplemented

    def __gt__(self, other):
        le = self.__le__(other)
        return NotImplemented if le is NotImplemented else not le

    def __ge__(self, other):
        lt = self.__lt__(other)
        return NotImplemented if lt is NotImplemented else not lt

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exp, other.exp)
        return Dyadic._raw((self.num << (e - self.exp))
                           + (other.num << (e - other.exp)), e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exp, other.exp)
        return Dyadic._raw((self.num << (e - self.exp))
                           - (other.num << (e - other.exp)), e)

    def in_unit(self) -> bool:
        return 0 <= self.num <= (1 << self.exp)


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 2)


def add_trunc(a: Dyadic, b: Dyadic) -> Dyadic:
    """x + y truncated at 1."""
    s = a + b
    return s if s < ONE else ONE


def sub_trunc(a: Dyadic, b: Dyadic) -> Dyadic:
    """x - y truncated at 0."""
    if a <= b:
        return ZERO
    return a - b


def half(a: Dyadic) -> Dyadic:
    return Dyadic._raw(a.num, a.exp + 1)


def double(a: Dyadic) -> Dyadic:
    d = Dyadic._raw(a.num, a.exp - 1) if a.exp else Dyadic._raw(a.num * 2, 0)
    return d if d < ONE else ONE


def jstar(a: Dyadic) -> Dyadic:
    """j*(x) = x/2 + 1/2."""
    return half(a) + HALF


def jmap(a: Dyadic) -> Dyadic:
    """j(x) = max(2x - 1, 0)."""
    return sub_trunc(a + a, ONE)


def alpha(a: Dyadic) -> Dyadic:
    """alpha(x) = max(x/2, j(x)); an increasing bijection of [0,1]."""
    h, j = half(a), jmap(a)
    return h if j < h else j


def beta(a: Dyadic) -> Dyadic:
    """beta = alpha^{-1}: x -> min(2x, x/2 + 1/2)."""
    d, js = double(a), jstar(a)
    return d if d < js else js


def midpoint(a: Dyadic, b: Dyadic) -> Dyadic:
    e = max(a.exp, b.exp) + 1
    return Dyadic._raw((a.num << (e - a.exp)) + (b.num << (e - b.exp)), e + 1)


def grid(exponent: int) -> list[Dyadic]:
    """All points k/2^exponent in [0, 1]."""
    return [Dyadic(k, 2**exponent) for k in range(2**exponent + 1)]
