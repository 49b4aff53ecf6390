"""JSON schemas for polynomials, curves, fields, forms, obstacles, shears and reports."""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from .distcalc import DiffForm, VectorField
from .exactnum import format_gaussian, parse_gaussian
from .guards import InvalidInput
from .obstacles import ShellSet
from .poly import STANDARD_AMBIENT, MultiPoly, PolyCurve, PolyMap, UniPoly
from .transport import PolyAutomorphism, compose_shears, make_shear


class TermSchema(BaseModel):
    """One monomial: exponents in ambient order and an exact coefficient."""

    exp: List[int] = Field(description="Exponent per ambient coordinate")
    coef: str = Field(description="Coefficient in the form a/b+c/d*i")

    @field_validator("exp")
    @classmethod
    def _nonnegative(cls, value: List[int]) -> List[int]:
        if any(e < 0 for e in value):
            raise ValueError("exponents must be nonnegative")
        return value


class PolySchema(BaseModel):
    ambient: List[str] = Field(default_factory=lambda: list(STANDARD_AMBIENT))
    terms: List[TermSchema] = Field(default_factory=list)

    @classmethod
    def from_poly(cls, p: MultiPoly) -> PolySchema:
        return cls(
            ambient=list(p.ambient),
            terms=[TermSchema(exp=list(e), coef=format_gaussian(c)) for e, c in p.items()],
        )

    def to_poly(self) -> MultiPoly:
        for term in self.terms:
            if len(term.exp) != len(self.ambient):
                raise InvalidInput(f"exponent {term.exp} does not match ambient {self.ambient}")
        return MultiPoly(self.ambient, {tuple(t.exp): parse_gaussian(t.coef) for t in self.terms})

    @classmethod
    def from_unipoly(cls, u: UniPoly, variable: str = "zeta") -> PolySchema:
        return cls(
            ambient=[variable],
            terms=[TermSchema(exp=[k], coef=format_gaussian(c)) for k, c in enumerate(u.coeffs) if c],
        )

    def to_unipoly(self) -> UniPoly:
        if len(self.ambient) != 1:
            raise InvalidInput(f"a curve component has one variable, got {self.ambient}")
        degree = max((t.exp[0] for t in self.terms), default=-1)
        coeffs = [parse_gaussian("0")] * (degree + 1)
        for t in self.terms:
            coeffs[t.exp[0]] = coeffs[t.exp[0]] + parse_gaussian(t.coef)
        return UniPoly(coeffs)


class CurveSchema(BaseModel):
    """Curve components keyed by coordinate, each a polynomial in ζ."""

    components: Dict[str, PolySchema]

    @classmethod
    def from_curve(cls, curve: PolyCurve) -> CurveSchema:
        return cls(components={name: PolySchema.from_unipoly(u) for name, u in curve.items()})

    def to_curve(self) -> PolyCurve:
        return PolyCurve([(name, schema.to_unipoly()) for name, schema in self.components.items()])


class MapSchema(BaseModel):
    source: List[str]
    components: Dict[str, PolySchema]

    @classmethod
    def from_map(cls, m: PolyMap) -> MapSchema:
        return cls(source=list(m.source), components={t: PolySchema.from_poly(c) for t, c in zip(m.target, m.components)})

    def to_map(self) -> PolyMap:
        return PolyMap(self.source, list(self.components), [s.to_poly() for s in self.components.values()])


class FieldSchema(BaseModel):
    type: Literal["field"] = "field"
    ambient: List[str] = Field(default_factory=lambda: list(STANDARD_AMBIENT))
    components: Dict[str, PolySchema] = Field(default_factory=dict)

    @classmethod
    def from_field(cls, X: VectorField) -> FieldSchema:
        return cls(
            ambient=list(X.ambient),
            components={a: PolySchema.from_poly(c) for a, c in zip(X.ambient, X.components) if not c.is_zero()},
        )

    def to_field(self) -> VectorField:
        return VectorField.from_mapping(self.ambient, {a: s.to_poly() for a, s in self.components.items()})


class FormTermSchema(BaseModel):
    index: List[str] = Field(description="Increasing coordinate names of the basis form")
    coef: PolySchema


class FormSchema(BaseModel):
    type: Literal["form"] = "form"
    degree: int
    ambient: List[str] = Field(default_factory=lambda: list(STANDARD_AMBIENT))
    terms: List[FormTermSchema] = Field(default_factory=list)

    @classmethod
    def from_form(cls, omega: DiffForm) -> FormSchema:
        return cls(
            degree=omega.degree,
            ambient=list(omega.ambient),
            terms=[
                FormTermSchema(index=[omega.ambient[i] for i in index], coef=PolySchema.from_poly(c))
                for index, c in omega.items()
            ],
        )

    def to_form(self) -> DiffForm:
        coefficients = {}
        for term in self.terms:
            if len(term.index) != self.degree:
                raise InvalidInput(f"basis {term.index} does not have degree {self.degree}")
            unknown = [a for a in term.index if a not in self.ambient]
            if unknown:
                raise InvalidInput(f"unknown coordinates {unknown}")
            coefficients[tuple(self.ambient.index(a) for a in term.index)] = term.coef.to_poly()
        return DiffForm(self.ambient, self.degree, coefficients)


class ShellSetSchema(BaseModel):
    kind: Literal["A", "B", "K3", "KW", "Ln", "CR"]
    epsilon: Optional[str] = Field(default=None, description="K3 annulus half-width, rational in (0, 1/2]")
    n: Optional[int] = Field(default=None, description="L_n index; omitted means L_∞")
    R: Optional[str] = Field(default=None, description="C_R parameter, nonzero rational")

    def to_shell_set(self) -> ShellSet:
        return ShellSet.from_descriptor(self.model_dump(exclude_none=True))


class ShearSchema(BaseModel):
    target: Literal["w", "x", "y", "z"]
    monomial: Dict[str, int] = Field(description="Powers of the other coordinates")
    coefficient: str = "1"

    def to_automorphism(self) -> PolyAutomorphism:
        return make_shear(self.target, self.monomial, parse_gaussian(self.coefficient))


class ShearListSchema(BaseModel):
    """Shears applied in order; the automorphism is the last one composed after the rest."""

    shears: List[ShearSchema] = Field(default_factory=list)

    def to_automorphism(self) -> PolyAutomorphism:
        return compose_shears([s.to_automorphism() for s in self.shears])


class ExperimentConfig(BaseModel):
    """What a CLI run was asked to do; echoed in every report."""

    subcommand: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    seed: int = 42
    samples: Optional[int] = None
    degree: Optional[int] = None
    restarts: Optional[int] = None
    out: Optional[str] = None
    format: Literal["json"] = "json"

    @field_validator("seed")
    @classmethod
    def _sixty_four_bits(cls, value: int) -> int:
        if not 0 <= value < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return value


class Report(BaseModel):
    """Deterministic part of a run's output."""

    command: str
    version: str
    status: Literal["ok", "invalid-input", "verification-failure", "budget-exhausted"]
    exit_code: int
    config: ExperimentConfig
    result: Any = None
    error: Optional[str] = None


class RunMetadata(BaseModel):
    """Timing written next to the report, kept out of it so reports compare byte for byte."""

    started_at: str
    finished_at: str
    duration_seconds: float
    report_path: Optional[str] = None
