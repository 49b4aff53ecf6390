#!/usr/bin/env python3
"""
Tests for obstacle shells, membership and disc avoidance.
"""

import os
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.exactnum import gq
from engel.guards import InvalidInput
from engel.horizontal import integrate_horizontal_D
from engel.obstacles import (
    AvoidanceSettings,
    AvoidanceStatus,
    ShellKind,
    ShellSet,
    disc_avoids,
    disc_avoids_coefficients,
    eline_meets_shell,
    ln_structure,
    shell_membership,
    wline_shell_intersection,
)
from engel.poly import PolyCurve, UniPoly

ZETA = UniPoly.zeta()
SETTINGS = AvoidanceSettings()


def _curve(w, x, y, z):
    return PolyCurve([("w", w), ("x", x), ("y", y), ("z", z)])


def test_b_membership_examples():
    B = ShellSet.b()
    inside = shell_membership(B, (1, 0, 0, 0))
    assert inside.inside and inside.layer == 1
    assert not shell_membership(B, (0, 0, 0, 0))
    assert shell_membership(B, (0, gq(0, 2), 2 ** 12, 2 ** 7)).layer == 2


def test_a_membership_respects_caps():
    A = ShellSet.a()
    assert not shell_membership(A, (0, 0, 17, 1))
    assert shell_membership(A, (0, 0, 16, 1)).layer == 1
    assert shell_membership(A, (gq("3/5", "4/5"), 0, 0, 0)).layer == 1


def test_k3_annuli():
    K = ShellSet.k3(Fraction(1, 4))
    assert K.separated
    assert shell_membership(K, (gq("5/4"), 0, 0)).layer == 1
    assert not shell_membership(K, (gq("3/2"), 0, 0))
    assert shell_membership(K, (0, gq(0, 2), 0, 99)).layer == 2
    touching = ShellSet.k3()
    assert not touching.separated
    assert shell_membership(touching, (gq("3/2"), 0, 0)).layer == 1


def test_kw_layers():
    KW = ShellSet.kw()
    assert shell_membership(KW, (0, 1, 2)).layer == 1
    assert not shell_membership(KW, (0, 1, 3))


def test_ln_and_cr_membership():
    L3 = ShellSet.ln(3)
    assert shell_membership(L3, (0, 2, 0, 0)).layer == 2
    assert not shell_membership(L3, (0, 4, 0, 0))
    assert not shell_membership(L3, (0, gq(2, 1), 0, 0))
    assert shell_membership(ShellSet.ln(None), (5, 5, 5, 5))
    C = ShellSet.cr(2)
    assert shell_membership(C, (1, gq(0, 2))).layer == 3
    assert shell_membership(C, (0, 7)).layer == 4
    assert not shell_membership(C, (1, 7))


def test_float_membership_uses_tolerance():
    B = ShellSet.b()
    assert shell_membership(B, (1.0 + 1e-12j, 0.0, 0.0, 0.0)).layer == 1
    assert not shell_membership(B, (0.9, 0.0, 0.0, 0.0))
    assert shell_membership(ShellSet.cr(1), (2.0, 1j + 1e-12)).layer == 3


def test_invalid_shells():
    with pytest.raises(InvalidInput):
        ShellSet.k3(Fraction(0))
    with pytest.raises(InvalidInput):
        ShellSet.k3(Fraction(3, 4))
    with pytest.raises(InvalidInput):
        ShellSet.cr(0)
    with pytest.raises(InvalidInput):
        ShellSet.ln(0)
    with pytest.raises(InvalidInput):
        shell_membership(ShellSet.b(), (0, 0, 0))


@pytest.mark.parametrize("shell", [ShellSet.a(), ShellSet.b(), ShellSet.k3("1/8"), ShellSet.kw(), ShellSet.ln(2), ShellSet.ln(None), ShellSet.cr("-3/2")])
def test_descriptor_round_trip(shell):
    assert ShellSet.from_descriptor(shell.descriptor()) == shell


@given(st.integers(1, 6), st.fractions(0, 1, max_denominator=8))
@settings(max_examples=50, deadline=None)
def test_points_on_a_layer_are_members(i, t):
    B = ShellSet.b()
    radius = Fraction(2) ** (i - 1)
    point = (radius, gq(radius * t), 0, Fraction(2) ** (3 * i + 1))
    assert shell_membership(B, point).layer == i


def test_disc_avoidance_examples():
    B = ShellSet.b()
    origin = _curve(UniPoly(), UniPoly(), UniPoly(), UniPoly())
    assert disc_avoids(B, origin, settings=SETTINGS).certified

    on_shell = disc_avoids(B, _curve(UniPoly.constant(1), ZETA * gq("1/2"), UniPoly(), UniPoly()), settings=SETTINGS)
    assert on_shell.status == AvoidanceStatus.INTERSECTS
    assert on_shell.layer == 1

    small = integrate_horizontal_D(ZETA * gq("1/4"), ZETA * gq("1/2"), 0, 0)
    assert disc_avoids(B, small, settings=SETTINGS).certified


def test_disc_crossing_a_shell_is_found():
    B = ShellSet.b()
    crossing = disc_avoids(B, _curve(ZETA * 2, UniPoly(), UniPoly(), UniPoly()), settings=SETTINGS)
    assert crossing.status == AvoidanceStatus.INTERSECTS
    assert crossing.layer == 1
    assert abs(abs(crossing.witness) - 0.5) < 1e-6


def test_cap_excludes_every_layer():
    A = ShellSet.a()
    far = _curve(ZETA * 4, UniPoly(), UniPoly.constant(2 ** 30), UniPoly())
    assert disc_avoids(A, far, settings=SETTINGS).certified


def test_ln_and_cr_avoidance():
    x = ZETA * gq("1/4") + gq("5/2")
    curve = _curve(UniPoly.constant(1), x, UniPoly(), UniPoly())
    assert disc_avoids(ShellSet.ln(3), curve, settings=SETTINGS).certified
    assert disc_avoids(ShellSet.ln(None), curve, settings=SETTINGS).status == AvoidanceStatus.INTERSECTS
    hit = disc_avoids(ShellSet.ln(3), _curve(UniPoly(), ZETA * gq("1/2") + 2, UniPoly(), UniPoly()), settings=SETTINGS)
    assert hit.status == AvoidanceStatus.INTERSECTS and hit.layer == 2
    assert disc_avoids(ShellSet.cr(2), curve, settings=SETTINGS).certified
    assert not disc_avoids(ShellSet.cr(2), _curve(ZETA, x, UniPoly(), UniPoly()), settings=SETTINGS).certified


def test_avoidance_rejects_bad_radius():
    with pytest.raises(InvalidInput):
        disc_avoids(ShellSet.b(), _curve(ZETA, ZETA, ZETA, ZETA), radius=0.0)
    with pytest.raises(InvalidInput):
        disc_avoids_coefficients(ShellSet.b(), {"w": np.zeros(1)}, 1.0, SETTINGS)


@pytest.mark.parametrize("w, base, layer, target", [
    (ZETA, (0, 0, 0), 1, 1.0),
    (ZETA ** 2, (0, 0, 0), 1, 1.0),
    (ZETA + 5, (0, 3, 20), 5, 16.0),
])
def test_wline_intersection_examples(w, base, layer, target):
    witness = wline_shell_intersection(w, base)
    assert witness.layer == layer
    assert witness.target == target
    assert abs(abs(w.evaluate(witness.zeta)) - target) < 1e-8
    if layer == 1:
        assert abs(abs(witness.zeta) - 1.0) < 1e-8


def test_wline_rejects_constants_and_other_shells():
    with pytest.raises(InvalidInput):
        wline_shell_intersection(UniPoly.constant(1), (0, 0, 0))
    with pytest.raises(InvalidInput):
        wline_shell_intersection(ZETA, (0, 0, 0), ShellSet.b())


def test_eline_meets_a():
    meeting = eline_meets_shell((0, 0, 0), ShellSet.a())
    assert meeting.meets and meeting.layer == 1
    assert shell_membership(ShellSet.a(), (0, 0, 0, meeting.z)).layer == 1
    with pytest.raises(InvalidInput):
        eline_meets_shell((0, 0, 0), ShellSet.kw())


def test_ln_structure_components():
    assert ln_structure(1).component_count == 1
    assert ln_structure(3).component_count == 3
    assert ln_structure(None).component_count == 1
    assert ln_structure(2).contains((0, 2, 0, 0))
    assert ShellSet.ln(2).kind == ShellKind.LN
