#!/usr/bin/env python3
"""
Tests for vector fields, differential forms and the Engel flag checks.
"""

import os
import sys

import pytest
from hypothesis import given, settings

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.distcalc import (
    DiffForm,
    DistributionFrame,
    EngelFlag,
    FlagFailure,
    VectorField,
    annihilator_forms,
    characteristic_line_field,
    check_engel,
    check_even_contact,
    exterior_derivative,
    generic_rank,
    interior_product,
    lie_bracket,
    proportional,
    span_contains,
    wedge,
)
from engel.guards import DegreeOverflow, InvalidInput, RankDegeneration
from engel.poly import STANDARD_AMBIENT, MultiPoly
from engel_strategies import multipolys

AMB = STANDARD_AMBIENT
w, x, y, z = (MultiPoly.variable(AMB, a) for a in AMB)
d_w, d_x, d_y, d_z = (VectorField.coordinate(AMB, a) for a in AMB)
X_ST = VectorField.from_mapping(AMB, {"x": 1, "y": z, "z": w})
dw, dx, dy, dz = (DiffForm.dx(AMB, a) for a in AMB)


def test_lie_bracket_examples():
    assert lie_bracket(d_w, X_ST) == d_z
    assert lie_bracket(d_w, d_z).is_zero()
    assert lie_bracket(X_ST, d_z) == -d_y


def test_exterior_derivative_examples():
    contact = dy - dx * z
    assert exterior_derivative(contact) == DiffForm.dx(AMB, "x", "z")
    assert exterior_derivative(dx).is_zero()
    assert exterior_derivative(dx * w) == DiffForm.dx(AMB, "w", "x")
    with pytest.raises(DegreeOverflow):
        exterior_derivative(DiffForm.dx(AMB, "w", "x", "y", "z"))


def test_interior_product_examples():
    assert interior_product(d_x, dx) == DiffForm.function(MultiPoly.constant(AMB, 1))
    assert interior_product(d_w, dy - dx * z).is_zero()
    assert interior_product(X_ST, DiffForm.dx(AMB, "x", "z")) == dz - dx * w


def test_wedge_examples():
    assert wedge(dx, dy) == DiffForm(AMB, 2, {(1, 2): 1})
    assert wedge(dx, dx).is_zero()
    expected = DiffForm.dx(AMB, "y", "z") + DiffForm.dx(AMB, "x", "y") * w - DiffForm.dx(AMB, "x", "z") * z
    assert wedge(dy - dx * z, dz - dx * w) == expected
    assert wedge(dx, dy) == -wedge(dy, dx)


@given(multipolys(), multipolys())
@settings(max_examples=40, deadline=None)
def test_d_squared_vanishes(f, g):
    one_form = DiffForm.one_form(AMB, {"x": f, "z": g})
    assert exterior_derivative(exterior_derivative(DiffForm.function(f))).is_zero()
    assert exterior_derivative(exterior_derivative(one_form)).is_zero()


@given(multipolys(), multipolys(), multipolys())
@settings(max_examples=30, deadline=None)
def test_jacobi_identity(a, b, c):
    X = VectorField(AMB, [a, 1, 0, 0])
    Y = VectorField(AMB, [0, b, 1, 0])
    Z = VectorField(AMB, [0, 0, c, 1])
    total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
    assert total.is_zero()


def test_generic_rank_examples():
    assert generic_rank([d_w, X_ST]) == 2
    assert generic_rank([d_w, d_w * 2]) == 1
    assert generic_rank([d_w, X_ST, lie_bracket(d_w, X_ST)]) == 3


def test_generic_rank_ignores_degenerate_points():
    # rank 2 away from x = 0
    assert generic_rank([d_w, d_y * x]) == 2
    assert generic_rank([d_w * x, d_w * y]) == 1


def test_span_contains_and_proportional():
    assert span_contains(d_w * (x + 1) + X_ST * y, [d_w, X_ST])
    assert not span_contains(d_z, [d_w, X_ST])
    assert proportional(d_w * (z * z + 1), d_w)
    assert not proportional(d_w, d_x)


def test_even_contact():
    E = DistributionFrame([d_w, d_z, VectorField.from_mapping(AMB, {"x": 1, "y": z})], 3)
    assert check_even_contact(E)
    assert not check_even_contact(DistributionFrame([d_w, d_x, d_y], 3))


def test_frame_rank_is_checked():
    with pytest.raises(RankDegeneration):
        DistributionFrame([d_w, d_w * 2], 2)
    with pytest.raises(InvalidInput):
        DistributionFrame([d_w], 2)


def test_characteristic_line_of_standard_contact():
    E = DistributionFrame([d_w, d_z, VectorField.from_mapping(AMB, {"x": 1, "y": z})], 3)
    assert proportional(characteristic_line_field(E), d_w)
    (alpha,) = annihilator_forms(E)
    assert alpha.pair(d_w).is_zero()
    assert alpha.pair(d_z).is_zero()
    assert not alpha.pair(d_y).is_zero()


def test_standard_flag():
    flag = check_engel([d_w, X_ST])
    assert isinstance(flag, EngelFlag)
    assert flag.ok
    assert proportional(flag.W, d_w)
    assert len(flag.d_forms) == 2
    assert len(flag.e_forms) == 1
    contact = dy - dx * z
    for X in flag.E:
        assert contact.pair(X).is_zero()
    for form in flag.defining_forms:
        for X in flag.D:
            assert form.pair(X).is_zero()


def test_flag_failures_are_reported():
    integrable = check_engel([d_w, d_x])
    assert isinstance(integrable, FlagFailure)
    assert integrable.stage == "rank-3"
    assert integrable.observed_rank == 2
    assert not integrable.ok

    collapsed = check_engel([d_w, d_w * x])
    assert isinstance(collapsed, FlagFailure)
    assert collapsed.stage == "rank-2"

    # E = span(∂_w, ∂_x, ∂_y) is integrable
    contact_only = check_engel([d_w, VectorField.from_mapping(AMB, {"x": 1, "y": w})])
    assert isinstance(contact_only, FlagFailure)
    assert contact_only.stage == "even-contact"


def test_engel_checks_need_four_coordinates():
    with pytest.raises(InvalidInput):
        check_engel([VectorField.coordinate(("x", "y", "z"), "x")])
