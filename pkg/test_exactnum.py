#!/usr/bin/env python3
"""
Tests for exact Gaussian-rational arithmetic and exact linear algebra.
"""

import os
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.exactnum import (
    GaussianRational,
    Ordering,
    abs2,
    as_exact_vector,
    checked_complex,
    cmp_abs_to_dyadic,
    cmp_abs_to_rational,
    exact_sqrt,
    format_gaussian,
    from_float,
    gaussian_arith,
    gq,
    parse_gaussian,
    rank_exact,
    solve_exact,
)
from engel.guards import ExactDivisionByZero, InvalidInput, NonFiniteValue
from engel_strategies import gaussians


def test_arithmetic_examples():
    assert gaussian_arith(gq(1, 1), gq(1, -1), "mul") == 2
    assert gaussian_arith(gq("3/2", 2), gq("-3/2", -2), "add") == 0
    assert gaussian_arith(gq(1, 2), gq(3, 4), "div") == gq("11/25", "2/25")


def test_division_by_zero_is_explicit():
    with pytest.raises(ExactDivisionByZero):
        gaussian_arith(gq(1), gq(0), "div")
    with pytest.raises(InvalidInput):
        gaussian_arith(gq(1), gq(1), "pow")


def test_abs2_examples():
    assert abs2(gq(0)) == 0
    assert abs2(gq("3/2", 2)) == Fraction(25, 4)
    assert abs2(gq(1, 1)) == 2


def test_dyadic_comparison_examples():
    assert cmp_abs_to_dyadic(gq(1), 0) == Ordering.EQUAL
    assert cmp_abs_to_dyadic(gq(1, 1), 0) == Ordering.GREATER
    assert cmp_abs_to_dyadic(gq("3/5", "4/5"), 0) == Ordering.EQUAL
    assert cmp_abs_to_dyadic(gq("1/4"), -1) == Ordering.LESS
    assert cmp_abs_to_rational(gq("3/2"), Fraction(3, 2)) == Ordering.EQUAL


def test_representation_is_canonical():
    a = GaussianRational(Fraction(2, 4), Fraction(-6, 3))
    b = gq("1/2", -2)
    assert a == b
    assert hash(a) == hash(b)
    assert a.re.denominator == 2


@given(gaussians(), gaussians(), gaussians())
@settings(max_examples=200, deadline=None)
def test_field_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert abs2(a * b) == abs2(a) * abs2(b)
    if a:
        assert a * a.inverse() == 1


@given(gaussians())
@settings(max_examples=200, deadline=None)
def test_dyadic_comparison_agrees_with_floats(c):
    for k in (-2, -1, 0, 1, 2):
        margin = abs(complex(c)) - 2.0 ** k
        if abs(margin) > 1e-9:
            expected = Ordering.LESS if margin < 0 else Ordering.GREATER
            assert cmp_abs_to_dyadic(c, k) == expected


def test_parse_and_format():
    assert parse_gaussian("1/2-3/4*i") == gq("1/2", "-3/4")
    assert parse_gaussian("i") == gq(0, 1)
    assert parse_gaussian("-2*i") == gq(0, -2)
    assert parse_gaussian("-3/2") == gq("-3/2")
    assert parse_gaussian("1+i") == gq(1, 1)
    assert format_gaussian(gq("1/2", "-3/4")) == "1/2-3/4*i"
    assert format_gaussian(gq(0, -1)) == "-i"
    with pytest.raises(InvalidInput):
        parse_gaussian("one")
    with pytest.raises(InvalidInput):
        parse_gaussian("")


def test_exact_sqrt():
    assert exact_sqrt(Fraction(1, 16)) == Fraction(1, 4)
    assert exact_sqrt(Fraction(2)) is None
    assert exact_sqrt(Fraction(-1)) is None


def test_float_side_rejects_non_finite():
    assert checked_complex(gq(1, 2)) == complex(1, 2)
    with pytest.raises(NonFiniteValue):
        checked_complex(float("nan"))
    with pytest.raises(NonFiniteValue):
        from_float(complex(float("inf"), 0))
    assert from_float(0.25 + 0.5j) == gq("1/4", "1/2")


def test_rank_and_solve():
    witness = rank_exact([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert witness.rank == 2
    assert witness.rows == (0, 2)
    assert solve_exact([[2, 0], [0, 4]], [1, 1]) == [gq("1/2"), gq("1/4")]
    with pytest.raises(ExactDivisionByZero):
        solve_exact([[1, 1], [1, 1]], [0, 1])


def test_as_exact_vector_accepts_strings():
    assert as_exact_vector(["1/2", 3, Fraction(1, 3)]) == (gq("1/2"), gq(3), gq("1/3"))
    with pytest.raises(InvalidInput):
        as_exact_vector([0.5])
