import pytest
from hypothesis import given
from hypothesis import strategies as st

from defect_forge.defect import Cmp
from defect_forge.errors import ArgumentError
from defect_forge.ordinal import (
    ONE,
    ZERO,
    OrdinalCNF,
    compare_ordinals,
    format_ordinal,
    nat_prod,
    nat_sum,
    omega_power,
    parse_ordinal,
)

W = omega_power(1)
ordinals = st.lists(st.integers(0, 50), max_size=5).map(lambda c: OrdinalCNF(tuple(c)))
nonzero = ordinals.filter(lambda a: a != ZERO)


def o(*coeffs):
    return OrdinalCNF(coeffs)


def test_canonical_form():
    assert o(1, 2, 0, 0).coeffs == (1, 2)
    assert o() == ZERO == o(0, 0)
    with pytest.raises(ArgumentError):
        o(1, -1)


def test_sum_examples():
    assert nat_sum(o(2, 1), o(1, 2)) == o(3, 3)
    assert nat_sum(ZERO, o(4, 0, 1)) == o(4, 0, 1)
    assert nat_sum(omega_power(2), W) == o(0, 1, 1)


def test_product_examples():
    assert nat_prod(o(1, 1), o(1, 1)) == o(1, 2, 1)
    assert nat_prod(W, o(3)) == o(0, 3)
    assert nat_prod(o(5, 2), ZERO) == ZERO


def test_compare_examples():
    assert compare_ordinals(W, o(1_000_000)) is Cmp.GREATER
    assert compare_ordinals(o(1, 0, 1), o(0, 1, 1)) is Cmp.LESS
    assert compare_ordinals(o(0, 2), o(0, 2)) is Cmp.EQUAL
    assert sorted([W, ONE, o(0, 0, 1), ZERO]) == [ZERO, ONE, W, o(0, 0, 1)]


def test_omega_powers():
    assert omega_power(0) == ONE
    assert omega_power(1) == o(0, 1)
    assert omega_power(3) == o(0, 0, 0, 1)


def test_format_and_parse():
    a = o(7, 5, 0, 2)
    assert format_ordinal(a) == "ω^3·2 + ω·5 + 7"
    assert parse_ordinal("ω^3·2 + ω·5 + 7") == a
    assert parse_ordinal("w^3*2 + w*5 + 7") == a
    assert format_ordinal(ZERO) == "0" and parse_ordinal("0") == ZERO
    with pytest.raises(ArgumentError):
        parse_ordinal("ω^ω")


@given(ordinals)
def test_parse_inverts_format(a):
    assert parse_ordinal(format_ordinal(a)) == a


@given(ordinals, ordinals, ordinals)
def test_semiring_laws(a, b, c):
    assert nat_sum(a, b) == nat_sum(b, a)
    assert nat_prod(a, b) == nat_prod(b, a)
    assert nat_sum(nat_sum(a, b), c) == nat_sum(a, nat_sum(b, c))
    assert nat_prod(nat_prod(a, b), c) == nat_prod(a, nat_prod(b, c))
    assert nat_prod(a, nat_sum(b, c)) == nat_sum(nat_prod(a, b), nat_prod(a, c))
    assert nat_sum(a, ZERO) == a and nat_prod(a, ONE) == a


@given(ordinals, nonzero)
def test_sum_strictly_increases(a, b):
    assert nat_sum(a, b) > a


@given(nonzero, ordinals, ordinals)
def test_product_strictly_monotone(a, b, c):
    if b != c:
        lo, hi = sorted((b, c))
        assert nat_prod(a, lo) < nat_prod(a, hi)


@given(st.integers(1, 5), st.data())
def test_closure_below_omega_powers(k, data):
    below = st.lists(st.integers(0, 50), max_size=k).map(lambda c: OrdinalCNF(tuple(c)))
    a, b = data.draw(below), data.draw(below)
    assert nat_sum(a, b) < omega_power(k)
    assert nat_prod(a, b) < omega_power(2 * k - 1)
