#!/usr/bin/env python3
"""
Tests for the affine obstruction between the triples {0, 1, Ri}.
"""

import os
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.exactnum import gq
from engel.guards import InvalidInput
from engel.moduli import (
    TripleSet,
    affine_bijection_exists,
    cr_membership,
    vr_membership,
    vr_membership_float,
)

nonzero_rationals = st.fractions(-6, 6, max_denominator=5).filter(lambda r: r != 0)


def test_distinct_parameters_are_not_equivalent():
    assert affine_bijection_exists(TripleSet.standard(1), TripleSet.standard(2)) is None


def test_scaling_is_found():
    S = TripleSet((gq(0), gq(1), gq(2)))
    T = TripleSet((gq(0), gq(2), gq(4)))
    witness = affine_bijection_exists(S, T)
    assert witness is not None
    assert witness.a == 2 and witness.b == 0
    assert {witness(s) for s in S} == set(T)
    back = witness.inverse()
    assert {back(t) for t in T} == set(S)


def test_reciprocal_parameter_is_equivalent():
    # h(ζ) = −iζ/R takes {0, 1, Ri} to {0, 1, −i/R}
    R = Fraction(3, 2)
    witness = affine_bijection_exists(TripleSet.standard(R), TripleSet.standard(-1 / R))
    assert witness is not None
    assert {witness(s) for s in TripleSet.standard(R)} == set(TripleSet.standard(-1 / R))


@given(nonzero_rationals)
@settings(max_examples=50, deadline=None)
def test_every_triple_is_equivalent_to_itself(R):
    witness = affine_bijection_exists(TripleSet.standard(R), TripleSet.standard(R))
    assert witness is not None
    assert witness.a == 1 and witness.b == 0
    assert witness.permutation == (0, 1, 2)


@given(nonzero_rationals, nonzero_rationals)
@settings(max_examples=100, deadline=None)
def test_affine_oracle(R, R_prime):
    S, T = TripleSet.standard(R), TripleSet.standard(R_prime)
    witness = affine_bijection_exists(S, T)
    if witness is None:
        assert R != R_prime
        assert R * R_prime != -1
    else:
        assert {witness(s) for s in S} == set(T)
        assert witness.to_dict()["permutation"] in ([0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 0, 1], [1, 2, 0], [2, 1, 0])


def test_triples_must_be_distinct():
    with pytest.raises(InvalidInput):
        TripleSet((gq(0), gq(0), gq(1)))
    with pytest.raises(InvalidInput):
        TripleSet.standard(0)


def test_vr_and_cr_membership():
    assert vr_membership(2, (5, 0, 3, 4))
    assert vr_membership(2, (5, gq(0, 2), 3, 4))
    assert not vr_membership(2, (5, gq(0, 1), 3, 4))
    assert cr_membership(2, (0, 17))
    assert cr_membership(2, (3, 1))
    assert not cr_membership(2, (3, 2))
    with pytest.raises(InvalidInput):
        vr_membership(0, (0, 0, 0, 0))
    with pytest.raises(InvalidInput):
        cr_membership(1, (0, 0, 0))


def test_float_membership_is_never_exact():
    result = vr_membership_float(2 ** 0.5, (0, 1j * 2 ** 0.5, 0, 0))
    assert result.inside
    assert not result.exact
    assert not vr_membership_float(2 ** 0.5, (0, 0.5, 0, 0)).inside
    with pytest.raises(InvalidInput):
        vr_membership_float(0.0, (0, 0, 0, 0))
