#!/usr/bin/env python3
"""
Tests for exact horizontal paths between points of the standard model.
"""

import os
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.exactnum import gq
from engel.guards import InvalidInput, VerificationFailure
from engel.horizontal import DiscModel, standard_forms, verify_tangency
from engel.poly import PolyCurve, UniPoly
from engel.steering import (
    HorizontalPath,
    PathSegment,
    hermite_polynomial,
    hermite_steer,
    jet_lift,
    jet_of,
    path_endpoint_check,
)
from engel_strategies import gaussians

points = st.tuples(gaussians(), gaussians(), gaussians(), gaussians())


def test_hermite_polynomial_matches_jets():
    y = hermite_polynomial(0, (1, 2, 3), 2, (gq(0, 1), -1, gq("1/2")))
    dy, ddy = y.derivative(), y.derivative().derivative()
    assert (y.evaluate(0), dy.evaluate(0), ddy.evaluate(0)) == (1, 2, 3)
    assert (y.evaluate(2), dy.evaluate(2), ddy.evaluate(2)) == (gq(0, 1), -1, gq("1/2"))
    assert y.degree() <= 5
    with pytest.raises(InvalidInput):
        hermite_polynomial(1, (0, 0, 0), 1, (0, 0, 0))


def test_jet_lift_is_horizontal():
    segment = jet_lift(UniPoly((0, 0, 0, 1)), 0, 1)
    assert verify_tangency(segment.curve, standard_forms()[DiscModel.D]).ok
    assert segment.initial() == (0, 0, 0, 0)
    assert segment.terminal() == (6, 1, 1, 3)
    assert jet_of(segment.terminal()) == (1, 3, 6)
    with pytest.raises(InvalidInput):
        jet_lift(UniPoly((0, 1)), 2, 2)


def test_segments_reject_non_horizontal_curves():
    zeta = UniPoly.zeta()
    with pytest.raises(VerificationFailure):
        PathSegment(PolyCurve([("w", UniPoly()), ("x", zeta), ("y", zeta), ("z", UniPoly())]))


def test_steer_between_distinct_x():
    p, q = (0, 0, 0, 0), (1, 2, gq(1, 1), gq("-1/2"))
    path = hermite_steer(p, q)
    assert len(path) == 1
    assert path_endpoint_check(path, p, q)
    assert path_endpoint_check(path.reversed(), q, p)


def test_steer_between_equal_x_detours():
    p, q = (0, 1, 0, 0), (gq(2, -1), 1, 5, 3)
    path = hermite_steer(p, q)
    assert len(path) == 2
    assert path.segments[0].terminal()[1] == 2
    assert path_endpoint_check(path, p, q)


def test_trivial_and_bad_paths():
    assert hermite_steer((1, 2, 3, 4), (1, 2, 3, 4)) == HorizontalPath()
    assert path_endpoint_check(HorizontalPath(), (1, 2, 3, 4), (1, 2, 3, 4))
    assert not path_endpoint_check(HorizontalPath(), (1, 2, 3, 4), (0, 2, 3, 4))
    assert not path_endpoint_check(hermite_steer((0, 0, 0, 0), (0, 1, 0, 0)), (0, 0, 0, 0), (0, 2, 0, 0))
    with pytest.raises(InvalidInput):
        hermite_steer((0, 0, 0), (0, 1, 0, 0))


@given(points, points)
@settings(max_examples=40, deadline=None)
def test_steering_reaches_any_point(p, q):
    path = hermite_steer(p, q)
    assert path_endpoint_check(path, p, q)
    for segment in path.segments:
        assert verify_tangency(segment.curve, standard_forms()[DiscModel.D]).ok
