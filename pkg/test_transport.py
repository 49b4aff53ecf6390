#!/usr/bin/env python3
"""
Tests for polynomial automorphisms, pullbacks and Cartan prolongation.
"""

import os
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.distcalc import (
    DiffForm,
    EngelFlag,
    VectorField,
    check_engel,
    exterior_derivative,
    lie_bracket,
    proportional,
)
from engel.exactnum import gq
from engel.guards import InvalidInput, VerificationFailure
from engel.horizontal import CONTACT_AMBIENT
from engel.poly import STANDARD_AMBIENT, MultiPoly, PolyMap
from engel.transport import (
    PolyAutomorphism,
    cartan_prolong,
    chart_transition_agrees,
    compose,
    compose_shears,
    make_shear,
    pullback_field,
    pullback_flag,
    pullback_form,
    random_shear,
    standard_contact_frame,
)

AMB = STANDARD_AMBIENT
w, x, y, z = (MultiPoly.variable(AMB, a) for a in AMB)
d_w, d_x, d_y, d_z = (VectorField.coordinate(AMB, a) for a in AMB)
X_ST = VectorField.from_mapping(AMB, {"x": 1, "y": z, "z": w})
SQUARE_SHEAR = make_shear("w", {"x": 2})


def test_shear_maps():
    assert SQUARE_SHEAR.forward["w"] == w + x * x
    assert SQUARE_SHEAR.inverse["w"] == w - x * x
    assert SQUARE_SHEAR.jacobian_determinant() == 1
    assert SQUARE_SHEAR.shears[0].to_dict() == {"target": "w", "monomial": {"x": 2}, "coefficient": "1"}


def test_shear_must_not_involve_its_target():
    with pytest.raises(InvalidInput):
        make_shear("w", {"w": 1, "x": 1})
    with pytest.raises(InvalidInput):
        make_shear("t", {"x": 1})


def test_automorphisms_are_verified():
    square = PolyMap(AMB, AMB, [w * w, x, y, z])
    with pytest.raises(VerificationFailure):
        PolyAutomorphism(square, PolyMap.identity(AMB))


def test_pullback_of_coordinate_field():
    assert pullback_field(SQUARE_SHEAR, d_x) == d_x - d_w * (2 * x)
    assert pullback_field(SQUARE_SHEAR, d_w) == d_w


def test_pullback_of_forms():
    dw = DiffForm.dx(AMB, "w")
    assert pullback_form(SQUARE_SHEAR, dw) == dw + DiffForm.dx(AMB, "x") * (2 * x)
    contact = DiffForm.one_form(AMB, {"y": 1, "x": -z})
    assert pullback_form(PolyAutomorphism.identity(), contact) == contact


def test_composition_order():
    first = make_shear("w", {"x": 1})
    second = make_shear("y", {"w": 1})
    composed = compose_shears([first, second])
    assert composed == compose(second, first)
    # second ∘ first sends y to y + (w + x)
    assert composed.forward["y"] == y + w + x
    assert len(composed.shears) == 2
    assert compose_shears([]) == PolyAutomorphism.identity()


def _shear_lists():
    return st.lists(st.integers(0, 2 ** 32 - 1), min_size=1, max_size=3)


@given(_shear_lists())
@settings(max_examples=15, deadline=None)
def test_pullback_is_natural(seeds):
    phi = compose_shears([random_shear(np.random.default_rng(s)) for s in seeds])
    assert phi.jacobian_determinant().is_constant()
    bracket = lie_bracket(d_w, X_ST)
    assert pullback_field(phi, bracket) == lie_bracket(pullback_field(phi, d_w), pullback_field(phi, X_ST))
    contact = DiffForm.one_form(AMB, {"y": 1, "x": -z})
    assert exterior_derivative(pullback_form(phi, contact)) == pullback_form(phi, exterior_derivative(contact))
    paired = pullback_form(phi, contact).pair(pullback_field(phi, X_ST))
    assert paired == phi.forward.pull(contact.pair(X_ST))


def test_pullback_flag():
    flag = check_engel([d_w, X_ST])
    assert isinstance(flag, EngelFlag)
    phi = compose_shears([SQUARE_SHEAR, make_shear("z", {"y": 1}, gq(0, 1))])
    pulled = pullback_flag(phi, flag)
    assert proportional(pulled.W, pullback_field(phi, d_w))
    for form in pulled.d_forms:
        for X in pulled.D:
            assert form.pair(X).is_zero()


def test_random_shears_are_reproducible():
    a = random_shear(np.random.default_rng(9))
    b = random_shear(np.random.default_rng(9))
    assert a == b
    assert a.forward.compose(a.inverse) == PolyMap.identity(AMB)


@pytest.mark.parametrize("chart, fiber", [("0", "t"), ("inf", "s")])
def test_prolongation_charts(chart, fiber):
    C1, C2, alpha = standard_contact_frame()
    frame = cartan_prolong(C1, C2, alpha, chart)
    assert frame.ambient == CONTACT_AMBIENT + (fiber,)
    flag = check_engel(frame)
    assert isinstance(flag, EngelFlag)
    assert proportional(flag.W, VectorField.coordinate(frame.ambient, fiber))


def test_prolongation_rejects_non_contact_forms():
    C1, C2, _ = standard_contact_frame()
    dy = DiffForm.dx(CONTACT_AMBIENT, "y")
    with pytest.raises(InvalidInput):
        cartan_prolong(VectorField.coordinate(CONTACT_AMBIENT, "x"), VectorField.coordinate(CONTACT_AMBIENT, "z"), dy)
    _, _, alpha = standard_contact_frame()
    with pytest.raises(InvalidInput):
        cartan_prolong(C1, VectorField.coordinate(CONTACT_AMBIENT, "y"), alpha)
    with pytest.raises(InvalidInput):
        cartan_prolong(C1, C2, alpha, "1")


def test_charts_agree_on_the_overlap():
    C1, C2, alpha = standard_contact_frame()
    assert chart_transition_agrees(C1, C2, alpha, samples=6, seed=5)
