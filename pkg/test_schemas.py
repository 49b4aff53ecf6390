#!/usr/bin/env python3
"""
Tests for the JSON schemas used by the CLI inputs and reports.
"""

import os
import sys

import pytest
from hypothesis import given, settings
from pydantic import ValidationError

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.distcalc import DiffForm, VectorField, wedge
from engel.exactnum import gq
from engel.guards import InvalidInput
from engel.horizontal import remark_line
from engel.obstacles import ShellKind
from engel.poly import STANDARD_AMBIENT, MultiPoly
from engel.schemas import (
    CurveSchema,
    ExperimentConfig,
    FieldSchema,
    FormSchema,
    MapSchema,
    PolySchema,
    ShearListSchema,
    ShellSetSchema,
    TermSchema,
)
from engel.transport import compose_shears, make_shear
from engel_strategies import multipolys


@settings(max_examples=40, deadline=None)
@given(multipolys())
def test_poly_schema_preserves_polynomials(p):
    assert PolySchema.from_poly(p).to_poly() == p


def test_poly_schema_rejects_short_exponents():
    schema = PolySchema(terms=[TermSchema(exp=[1, 0], coef="1")])
    with pytest.raises(InvalidInput):
        schema.to_poly()


def test_negative_exponents_fail_validation():
    with pytest.raises(ValidationError):
        TermSchema(exp=[-1, 0, 0, 0], coef="1")


def test_poly_schema_coefficients_are_exact():
    p = MultiPoly.variable(STANDARD_AMBIENT, "x") * gq("1/3", "-2")
    dumped = PolySchema.from_poly(p).model_dump()
    assert dumped["terms"] == [{"exp": [0, 1, 0, 0], "coef": "1/3-2*i"}]


def test_curve_schema_keeps_component_order():
    disc = remark_line((0, 0, 0, 0), (1, 1, 0, 0))
    schema = CurveSchema.from_curve(disc.curve)
    assert list(schema.components) == ["w", "x", "y", "z"]
    assert schema.to_curve() == disc.curve


def test_curve_component_must_be_univariate():
    schema = CurveSchema(components={"x": PolySchema(ambient=["s", "t"], terms=[])})
    with pytest.raises(InvalidInput):
        schema.to_curve()


def test_field_schema_omits_zero_components():
    z = MultiPoly.variable(STANDARD_AMBIENT, "z")
    X = VectorField.from_mapping(STANDARD_AMBIENT, {"x": 1, "y": z})
    schema = FieldSchema.from_field(X)
    assert set(schema.components) == {"x", "y"}
    assert schema.to_field() == X


def test_form_schema_two_form():
    ambient = STANDARD_AMBIENT
    dw = DiffForm.one_form(ambient, {"w": 1})
    alpha = DiffForm.one_form(ambient, {"y": 1, "x": -MultiPoly.variable(ambient, "z")})
    omega = wedge(dw, alpha)
    schema = FormSchema.from_form(omega)
    assert schema.degree == 2
    assert schema.to_form() == omega


def test_form_schema_rejects_wrong_degree():
    schema = FormSchema(degree=2, terms=[{"index": ["w"], "coef": {"terms": [{"exp": [0, 0, 0, 0], "coef": "1"}]}}])
    with pytest.raises(InvalidInput):
        schema.to_form()


def test_form_schema_rejects_unknown_coordinates():
    schema = FormSchema(degree=1, terms=[{"index": ["q"], "coef": {"terms": []}}])
    with pytest.raises(InvalidInput):
        schema.to_form()


def test_shell_set_schema():
    S = ShellSetSchema(kind="K3", epsilon="1/4").to_shell_set()
    assert S.kind == ShellKind.K3
    assert S.descriptor()["epsilon"] == "1/4"
    assert ShellSetSchema(kind="Ln").to_shell_set().n is None


def test_shell_set_schema_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        ShellSetSchema(kind="Q")


def test_shear_list_applies_in_order():
    schema = ShearListSchema.model_validate({
        "shears": [
            {"target": "w", "monomial": {"x": 2}},
            {"target": "y", "monomial": {"w": 1}, "coefficient": "1/2"},
        ]
    })
    expected = compose_shears([make_shear("w", {"x": 2}), make_shear("y", {"w": 1}, gq("1/2"))])
    phi = schema.to_automorphism()
    assert phi.forward == expected.forward
    assert len(phi.shears) == 2


def test_empty_shear_list_is_identity():
    phi = ShearListSchema().to_automorphism()
    assert phi.forward == phi.inverse


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_experiment_seed_range(seed):
    with pytest.raises(ValidationError):
        ExperimentConfig(subcommand="flag", seed=seed)


def test_experiment_config_defaults():
    cfg = ExperimentConfig(subcommand="flag")
    assert cfg.seed == 42
    assert cfg.format == "json"
    assert cfg.inputs == {}


def test_map_schema_carries_a_shear():
    forward = make_shear("w", {"x": 2}).forward
    schema = MapSchema.from_map(forward)
    assert schema.source == list(STANDARD_AMBIENT)
    assert schema.to_map() == forward
