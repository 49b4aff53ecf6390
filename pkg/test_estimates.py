#!/usr/bin/env python3
"""
Tests for the derivative estimates, the Finsler lower bound and the disc samplers.
"""

import os
import sys
from fractions import Fraction

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.estimates import (
    REGIMES,
    _verdict,
    cauchy_derivative_bound,
    finsler_lower_bound,
    lemma_A_verdict,
    lemma_B_verdict,
    lemma_proof_trace,
    lemma_thresholds,
    minimal_ball_exponent,
    point_in_ball,
    sample_certified_discs,
    sample_crossing_disc,
    sample_line_disc,
    sample_rng,
    sample_subshell_disc,
    stretch_to_limit,
)
from engel.exactnum import gq
from engel.guards import InvalidInput, NotInDistribution
from engel.horizontal import integrate_horizontal_D, w_line
from engel.obstacles import AvoidanceSettings, ShellSet, disc_avoids
from engel.poly import UniPoly

ZETA = UniPoly.zeta()
SETTINGS = AvoidanceSettings()
SMALL_DISC = integrate_horizontal_D(ZETA * gq("1/4"), ZETA * gq("1/2"), 0, 0)


def test_finsler_lower_bound_at_origin():
    bound = finsler_lower_bound((0, 0, 0, 0), (0, 1, 0, 0))
    assert bound.N0 == 1
    assert bound.value_sq == Fraction(1, 16)
    assert bound.exact_value == Fraction(1, 4)
    assert bound.value == pytest.approx(0.25)
    assert finsler_lower_bound((0, 0, 0, 0), (0, 1, 0, 0), "A").exact_value == Fraction(1, 4)


def test_finsler_lower_bound_scales_with_direction():
    p = (1, 0, 0, 2)
    v = (2, 1, 2, 1)
    single = finsler_lower_bound(p, v)
    double = finsler_lower_bound(p, [2 * c for c in v])
    assert double.value_sq == 4 * single.value_sq
    assert single.to_dict()["model"] == "B"


def test_finsler_lower_bound_needs_d_vectors():
    with pytest.raises(NotInDistribution):
        finsler_lower_bound((0, 0, 0, 1), (0, 1, 0, 0))
    with pytest.raises(InvalidInput):
        finsler_lower_bound((0, 0, 0), (0, 1, 0))


def test_thresholds_and_balls():
    assert lemma_thresholds("B", 1) == {"w": 2, "x": 2, "y": 5, "z": 3}
    assert lemma_thresholds("A", 2) == {"w": 3, "x": 3, "y": 5, "z": 3}
    with pytest.raises(InvalidInput):
        lemma_thresholds("C", 1)
    assert point_in_ball((1, 0, 0, gq(0, 1)), 1)
    assert not point_in_ball((2, 0, 0, 0), 1)
    assert minimal_ball_exponent((3, 0, 0, 0)) == 2
    assert minimal_ball_exponent((0, 0, 0, 0)) == 1


def test_cauchy_bound():
    assert cauchy_derivative_bound(2.0, 0.5) == 4.0
    with pytest.raises(InvalidInput):
        cauchy_derivative_bound(1.0, 0.0)
    with pytest.raises(InvalidInput):
        cauchy_derivative_bound(-1.0, 1.0)


def test_verdicts_on_a_small_disc():
    verdict = lemma_B_verdict(SMALL_DISC, 1, settings=SETTINGS)
    assert verdict.passed
    assert [b.coordinate for b in verdict.bounds] == ["w", "x", "y", "z"]
    assert verdict.bounds[1].observed_sq == "1/4"
    assert lemma_A_verdict(SMALL_DISC, 1, settings=SETTINGS).passed


def test_verdict_hypotheses_are_checked():
    with pytest.raises(InvalidInput):
        lemma_B_verdict(SMALL_DISC, 1, ShellSet.a(), SETTINGS)
    with pytest.raises(InvalidInput):
        lemma_B_verdict(w_line(ZETA, (0, 0, 0)), 1, settings=SETTINGS)
    with pytest.raises(InvalidInput):
        lemma_B_verdict(SMALL_DISC, 0, settings=SETTINGS)
    far = integrate_horizontal_D(ZETA * gq("1/4"), ZETA * gq("1/2"), 10, 0)
    with pytest.raises(InvalidInput):
        lemma_B_verdict(far, 1, settings=SETTINGS)
    on_shell = integrate_horizontal_D(UniPoly.constant(1), ZETA * gq("1/2"), 0, 0)
    with pytest.raises(InvalidInput, match="not certified"):
        lemma_B_verdict(on_shell, 1, settings=SETTINGS)


def test_proof_trace_holds_on_a_small_disc():
    steps = lemma_proof_trace(SMALL_DISC, "B")
    assert steps
    assert all(step.holds for step in steps)
    assert all(step.holds for step in lemma_proof_trace(SMALL_DISC, "A"))


def test_samplers_are_deterministic():
    first = sample_subshell_disc(sample_rng(11, 3))
    second = sample_subshell_disc(sample_rng(11, 3))
    assert first.curve == second.curve
    assert sample_crossing_disc(sample_rng(11, 4)).curve == sample_crossing_disc(sample_rng(11, 4)).curve


def test_subshell_discs_avoid_b():
    for index in range(4):
        disc = sample_subshell_disc(sample_rng(5, index))
        assert point_in_ball(disc.basepoint, 1)
        assert disc_avoids(ShellSet.b(), disc, settings=SETTINGS).certified


@pytest.mark.parametrize("model", ["A", "B"])
def test_certified_samples_pass(model):
    samples = sample_certified_discs(model, 4, 2024, SETTINGS)
    assert samples
    assert all(s.verdict.passed for s in samples)
    assert all(s.regime == REGIMES[s.index % 4] for s in samples)
    again = sample_certified_discs(model, 4, 2024, SETTINGS)
    assert [s.verdict for s in samples] == [s.verdict for s in again]


def _failed(verdict):
    return [b.coordinate for b in verdict.bounds if not b.passed]


def test_x_derivative_at_the_threshold_fails():
    at_threshold = integrate_horizontal_D(UniPoly.constant(0), ZETA * gq(4), 0, 0)
    verdict = _verdict("B", at_threshold, 1)
    assert not verdict.passed
    assert _failed(verdict) == ["x"]
    assert verdict.bounds[1].observed_sq == "16"

    below = integrate_horizontal_D(UniPoly.constant(0), ZETA * gq("4095/1024"), 0, 0)
    assert _verdict("B", below, 1).passed


def test_z_derivative_at_the_a_threshold_fails():
    # z′(0) = w(0)·x′(0) = 4 = 2^{N0+1}
    disc = integrate_horizontal_D(UniPoly.constant(2), ZETA * gq(2), 0, 0)
    assert disc.component("z").coefficient(1) == gq(4)
    verdict = _verdict("A", disc, 1)
    assert not verdict.passed
    assert _failed(verdict) == ["z"]
    assert _verdict("B", disc, 1).passed


def test_stretching_moves_a_disc_to_the_edge_of_avoidance():
    factor, stretched = stretch_to_limit(SMALL_DISC, ShellSet.b(), SETTINGS)
    assert Fraction(3, 2) <= factor < 2
    assert stretched.basepoint == SMALL_DISC.basepoint
    assert stretched.component("x").coefficient(1) == gq("1/2") * factor
    assert disc_avoids(ShellSet.b(), stretched, settings=SETTINGS).certified
    assert lemma_B_verdict(stretched, 1, settings=SETTINGS).passed


def test_line_discs_start_inside_the_unit_block():
    for index in range(4):
        disc = sample_line_disc(sample_rng(9, index))
        assert disc.curve.degree() <= 3
        assert point_in_ball(disc.basepoint, 1)
        assert disc.component("x").coefficient(1) != 0


def _largest_ratio(verdict):
    return max(b.observed / 2.0 ** b.threshold_exponent for b in verdict.bounds)


@pytest.mark.parametrize("model", ["A", "B"])
def test_near_limit_samples_approach_the_thresholds(model):
    samples = [s for s in sample_certified_discs(model, 12, 77, SETTINGS) if s.regime == "near-limit"]
    assert samples
    assert all(s.verdict.passed for s in samples)
    assert max(_largest_ratio(s.verdict) for s in samples) > 1 / 8
