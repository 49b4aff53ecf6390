#!/usr/bin/env python3
"""
Tests for exact multivariate and univariate polynomials, curves and maps.
"""

import os
import sys

import pytest
from hypothesis import given, settings

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.exactnum import gq
from engel.guards import AmbientMismatch, InvalidInput, UnknownCoordinate
from engel.poly import (
    STANDARD_AMBIENT,
    MultiPoly,
    PolyCurve,
    PolyMap,
    UniPoly,
    antiderivative_zeta,
    compose_curve,
    determinant,
    poly_arith,
    remove_common_factor,
    sup_on_circle,
)
from engel_strategies import multipolys, unipolys

w, x, y, z = (MultiPoly.variable(STANDARD_AMBIENT, a) for a in STANDARD_AMBIENT)


def test_square_of_binomial():
    p = MultiPoly(STANDARD_AMBIENT, {(0, 0, 0, 0): 1, (1, 0, 0, 0): 1})
    expected = MultiPoly(STANDARD_AMBIENT, {(0, 0, 0, 0): 1, (1, 0, 0, 0): 2, (2, 0, 0, 0): 1})
    assert poly_arith(p, p, "mul") == expected
    assert p ** 2 == expected


def test_differentiate_and_evaluate():
    p = z * z * x
    assert p.differentiate("z") == 2 * z * x
    assert p.evaluate([0, 3, 0, gq(1, 1)]) == gq(0, 6)
    assert p.differentiate("y").is_zero()
    with pytest.raises(UnknownCoordinate):
        p.differentiate("t")


def test_ambient_mismatch_is_rejected():
    other = MultiPoly.variable(("x", "y", "z"), "x")
    with pytest.raises(AmbientMismatch):
        _ = x + other
    with pytest.raises(InvalidInput):
        poly_arith(x, 2, "mul")


def test_terms_are_canonical():
    p = x * y - y * x + z
    assert p == z
    assert str(MultiPoly.zero(STANDARD_AMBIENT)) == "0"
    assert (w + 1).degree() == 1
    assert MultiPoly.constant(STANDARD_AMBIENT, 0).is_zero()


@given(multipolys(), multipolys(), multipolys())
@settings(max_examples=60, deadline=None)
def test_ring_laws(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q).differentiate("x") == p.differentiate("x") * q + p * q.differentiate("x")


def test_substitute_and_maps():
    phi = PolyMap(STANDARD_AMBIENT, STANDARD_AMBIENT, [w + x * x, x, y, z])
    assert phi.pull(w) == w + x * x
    assert phi.compose(PolyMap.identity(STANDARD_AMBIENT)) == phi
    jac = phi.jacobian()
    assert jac[0][1] == 2 * x
    assert determinant(jac) == 1


def test_remove_common_factor():
    reduced = remove_common_factor([x * z, x * x])
    assert reduced == [z, x]
    assert remove_common_factor([x, y]) == [x, y]


def test_unipoly_antiderivative():
    zeta = UniPoly.zeta()
    assert antiderivative_zeta(zeta ** 2) == UniPoly([0, 0, 0, gq("1/3")])
    assert antiderivative_zeta(UniPoly.constant(5)) == UniPoly([0, 5])
    assert antiderivative_zeta(UniPoly()).is_zero()


@given(unipolys())
@settings(max_examples=80, deadline=None)
def test_antiderivative_inverts_derivative(u):
    assert antiderivative_zeta(u).derivative() == u


def test_unipoly_division():
    zeta = UniPoly.zeta()
    q, r = (zeta ** 2 - 1).divmod(zeta - 1)
    assert q == zeta + 1
    assert r.is_zero()
    with pytest.raises(InvalidInput):
        zeta.divmod(UniPoly())


def test_sup_on_circle_example():
    u = UniPoly([1, 0, 1])
    bound = sup_on_circle(u, 1.0, 64)
    assert bound.numeric_max == pytest.approx(2.0)
    assert 2.0 <= bound.certified_upper <= 2.2
    assert bound.samples == 64


def test_sup_on_circle_tightens_with_samples():
    u = UniPoly([gq(1, 2), gq("-1/3"), 0, gq(0, 1)])
    bounds = [sup_on_circle(u, 0.75, n).certified_upper for n in (16, 32, 64, 128, 256)]
    assert all(b >= a for a, b in zip(bounds[1:], bounds))
    assert bounds[-1] >= sup_on_circle(u, 0.75, 256).numeric_max


def test_sup_on_circle_rejects_bad_arguments():
    with pytest.raises(InvalidInput):
        sup_on_circle(UniPoly([1]), 0.0)
    with pytest.raises(InvalidInput):
        sup_on_circle(UniPoly([1]), 1.0, 4)


def test_curves_compose_exactly():
    zeta = UniPoly.zeta()
    curve = PolyCurve({"w": zeta, "x": zeta ** 2, "y": UniPoly(), "z": UniPoly.constant(1)})
    assert compose_curve(w * x + z, curve) == zeta ** 3 + 1
    assert curve.basepoint() == (0, 0, 0, 1)
    assert curve.velocity_at_zero() == (1, 0, 0, 0)
    assert curve.reparametrize(2)["x"] == UniPoly([0, 0, 4])
    with pytest.raises(InvalidInput):
        PolyCurve([("x", zeta), ("x", zeta)])
