from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypact.errors import StructuralError
from hypact.scalar import QuadScalar, as_scalar, floor_scalar, parse_scalar, squarefree_part

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
radicands = st.sampled_from([2, 3, 5])


@st.composite
def scalars(draw, d=None):
    d = draw(radicands) if d is None else d
    return QuadScalar(draw(fractions)) + draw(fractions) * QuadScalar.sqrt(d)


def as_mpf(x: QuadScalar):
    return x.to_mpf(80)


def test_squarefree_part():
    # (square-free part, square root of the rest)
    assert squarefree_part(12) == (3, 2)
    assert squarefree_part(50) == (2, 5)
    assert squarefree_part(7) == (7, 1)


def test_sqrt_of_square_is_rational():
    assert QuadScalar.sqrt(9) == 3
    assert QuadScalar.sqrt(8) == 2 * QuadScalar.sqrt(2)


def test_golden_ratio_identity():
    phi = (1 + QuadScalar.sqrt(5)) / 2
    assert phi * phi == phi + 1


def test_sign_of_close_values():
    # 140/99 < sqrt(2) < 99/70, each within 1e-4
    r2 = QuadScalar.sqrt(2)
    assert QuadScalar(Fraction(140, 99)) < r2 < QuadScalar(Fraction(99, 70))


def test_floor_near_integers():
    r2 = QuadScalar.sqrt(2)
    assert floor_scalar(1000 * r2) == 1414
    assert floor_scalar(-r2) == -2
    assert floor_scalar(Fraction(-7, 2)) == -4


def test_mixed_fields_rejected():
    with pytest.raises(StructuralError):
        QuadScalar.sqrt(2) + QuadScalar.sqrt(3)


def test_parse_roundtrip_examples():
    for text in ["sqrt(2)", "-1/3", "1/2 + 1/2*sqrt(5)", "2*sqrt(3)", "10*sqrt(2)", "3 - 2*sqrt(2)"]:
        x = parse_scalar(text)
        assert parse_scalar(str(x)) == x
    assert parse_scalar("10*sqrt(2)") == 10 * QuadScalar.sqrt(2)
    assert str(parse_scalar("-sqrt(5)")) == "-sqrt(5)"
    for bad in ["pi", "", "2sqrt(2)", "*sqrt(2)", "sqrt(2)+sqrt(3)", "1/0"]:
        with pytest.raises(ValueError):
            parse_scalar(bad)


@given(scalars(2), scalars(2), scalars(2))
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    if x != 0:
        assert x * x.inverse() == 1


@given(scalars(), scalars())
def test_order_agrees_with_high_precision(x, y):
    if x.d != y.d and not (x.is_rational or y.is_rational):
        return
    with mpmath.workdps(80):
        diff = as_mpf(x) - as_mpf(y)
    if diff != 0:
        assert (x < y) == (diff < 0)


@given(scalars())
def test_floor_brackets_value(x):
    f = floor_scalar(x)
    assert f <= x < f + 1


@given(scalars())
def test_str_parse_roundtrip(x):
    assert parse_scalar(str(x)) == x


@given(fractions)
def test_as_scalar_of_fraction(q):
    assert as_scalar(q) == q
    assert as_scalar(q).is_rational
