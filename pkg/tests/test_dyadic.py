from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from contlog import dyadic as dy
from contlog.dyadic import Dyadic, NotDyadicError

unit_dyadics = st.integers(0, 6).flatmap(
    lambda e: st.integers(0, 2**e).map(lambda k: Dyadic(k, 2**e)))


def test_canonical_form():
    d = Dyadic(4, 8)
    assert (d.numerator, d.exponent) == (1, 1)
    assert str(d) == "1/2"
    assert str(Dyadic(0, 16)) == "0"
    assert str(Dyadic(8, 8)) == "1"


def test_parse_forms():
    assert Dyadic.parse("3/4") == Dyadic(3, 4)
    assert Dyadic.parse("3/2^2") == Dyadic(3, 4)
    assert Dyadic.parse("0") == dy.ZERO
    assert Dyadic.parse("1") == dy.ONE


def test_non_dyadic_rejected():
    with pytest.raises(NotDyadicError):
        Dyadic(1, 3)


@given(unit_dyadics, unit_dyadics)
def test_order_matches_fractions(a, b):
    assert (a < b) == (a.as_fraction < b.as_fraction)
    assert (a <= b) == (a.as_fraction <= b.as_fraction)


@given(unit_dyadics, unit_dyadics)
def test_truncated_arithmetic(a, b):
    assert dy.add_trunc(a, b).as_fraction == min(a.as_fraction + b.as_fraction, 1)
    assert dy.sub_trunc(a, b).as_fraction == max(a.as_fraction - b.as_fraction, 0)


@given(unit_dyadics)
def test_unit_interval_operations(a):
    x = a.as_fraction
    assert dy.half(a).as_fraction == x / 2
    assert dy.double(a).as_fraction == min(2 * x, 1)
    assert dy.jstar(a).as_fraction == x / 2 + Fraction(1, 2)
    assert dy.jmap(a).as_fraction == max(2 * x - 1, 0)
    assert dy.alpha(a).as_fraction == max(x / 2, max(2 * x - 1, 0))
    assert dy.beta(a).as_fraction == min(2 * x, x / 2 + Fraction(1, 2))


@given(unit_dyadics)
def test_alpha_beta_inverse(a):
    assert dy.alpha(dy.beta(a)) == a
    assert dy.beta(dy.alpha(a)) == a


@given(unit_dyadics, unit_dyadics)
def test_midpoint(a, b):
    m = dy.midpoint(a, b)
    assert m.as_fraction == (a.as_fraction + b.as_fraction) / 2


def test_grid():
    g = dy.grid(2)
    assert [str(x) for x in g] == ["0", "1/4", "1/2", "3/4", "1"]
