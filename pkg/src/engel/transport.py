"""Polynomial automorphisms, pullbacks and Cartan prolongation.

Shears c ↦ c + m(others) are the automorphisms we can invert exactly;
compositions of them stand in for the biholomorphisms used to transport
the standard Engel structure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .distcalc import (
    DiffForm,
    DistributionFrame,
    EngelFlag,
    FlagFailure,
    VectorField,
    check_engel,
    exterior_derivative,
    generic_rank,
    proportional,
    wedge,
)
from .estimates import random_gaussian
from .exactnum import GaussianRational, Scalar, rank_exact
from .guards import InvalidInput, VerificationFailure
from .horizontal import CONTACT_AMBIENT, FIBER_NAME, Chart, contact_form, prolongation_ambient
from .poly import STANDARD_AMBIENT, MultiPoly, PolyMap, determinant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Shear:
    """c ↦ c + coefficient·monomial, the monomial given by its powers."""

    target: str
    powers: Tuple[Tuple[str, int], ...]
    coefficient: GaussianRational

    def to_dict(self) -> dict:
        return {"target": self.target, "monomial": dict(self.powers), "coefficient": str(self.coefficient)}


class PolyAutomorphism:
    """A polynomial automorphism with its polynomial inverse, both verified."""

    __slots__ = ("forward", "inverse", "shears")

    def __init__(self, forward: PolyMap, inverse: PolyMap, shears: Sequence[Shear] = ()):
        if forward.source != forward.target or inverse.source != forward.target or inverse.target != forward.source:
            raise InvalidInput("automorphisms map an ambient to itself")
        identity = PolyMap.identity(forward.source)
        if forward.compose(inverse) != identity or inverse.compose(forward) != identity:
            raise VerificationFailure("forward and inverse maps are not mutually inverse")
        det = determinant(forward.jacobian())
        if not det.is_constant() or det.is_zero():
            raise VerificationFailure(f"jacobian determinant {det} is not a nonzero constant")
        self.forward = forward
        self.inverse = inverse
        self.shears: Tuple[Shear, ...] = tuple(shears)

    @classmethod
    def identity(cls, ambient: Sequence[str] = STANDARD_AMBIENT) -> PolyAutomorphism:
        ident = PolyMap.identity(ambient)
        return cls(ident, ident)

    @property
    def ambient(self) -> Tuple[str, ...]:
        return self.forward.source

    @property
    def jacobian(self) -> Tuple[Tuple[MultiPoly, ...], ...]:
        return self.forward.jacobian()

    def jacobian_determinant(self) -> MultiPoly:
        return determinant(self.jacobian)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyAutomorphism):
            return NotImplemented
        return self.forward == other.forward

    def __hash__(self) -> int:
        return hash(self.forward)

    def __repr__(self) -> str:
        return f"PolyAutomorphism({self.forward!r})"


def make_shear(
    target: str,
    monomial: Union[MultiPoly, Mapping[str, int]],
    coefficient: Scalar = 1,
    ambient: Sequence[str] = STANDARD_AMBIENT,
) -> PolyAutomorphism:
    """c ↦ c + m with every other coordinate fixed; the inverse is c ↦ c − m."""
    ambient = tuple(ambient)
    if target not in ambient:
        raise InvalidInput(f"unknown shear target {target!r}")
    if isinstance(monomial, MultiPoly):
        shift = monomial.scale(coefficient) if coefficient != 1 else monomial
        powers: Tuple[Tuple[str, int], ...] = ()
    else:
        shift = MultiPoly.monomial(ambient, monomial, coefficient)
        powers = tuple(sorted((k, int(v)) for k, v in monomial.items() if v))
    if shift.ambient != ambient:
        raise InvalidInput(f"shear term lives on {shift.ambient}, expected {ambient}")
    if shift.involves(target):
        raise InvalidInput(f"shear term {shift} involves its target {target}")
    variables = [MultiPoly.variable(ambient, a) for a in ambient]
    k = ambient.index(target)
    forward = PolyMap(ambient, ambient, [v + shift if i == k else v for i, v in enumerate(variables)])
    inverse = PolyMap(ambient, ambient, [v - shift if i == k else v for i, v in enumerate(variables)])
    coef = GaussianRational.coerce(coefficient)
    return PolyAutomorphism(forward, inverse, (Shear(target, powers, coef),) if powers else ())


def compose(outer: PolyAutomorphism, inner: PolyAutomorphism) -> PolyAutomorphism:
    """outer ∘ inner."""
    return PolyAutomorphism(
        outer.forward.compose(inner.forward),
        inner.inverse.compose(outer.inverse),
        inner.shears + outer.shears,
    )


def compose_shears(shears: Sequence[PolyAutomorphism]) -> PolyAutomorphism:
    """Apply the shears in order: the result is shears[-1] ∘ … ∘ shears[0]."""
    if not shears:
        return PolyAutomorphism.identity()
    result = shears[0]
    for shear in shears[1:]:
        result = compose(shear, result)
    return result


def random_shear(rng: np.random.Generator, max_degree: int = 2, ambient: Sequence[str] = STANDARD_AMBIENT) -> PolyAutomorphism:
    """A shear with a random nonconstant monomial of degree ≤ max_degree in the other coordinates."""
    ambient = tuple(ambient)
    target = ambient[int(rng.integers(len(ambient)))]
    others = [a for a in ambient if a != target]
    powers: dict = {}
    while not powers:
        for name in others:
            e = int(rng.integers(0, max_degree + 1))
            if e and sum(powers.values()) + e <= max_degree:
                powers[name] = e
    coefficient = random_gaussian(rng, 4, 1)
    if coefficient == 0:
        coefficient = GaussianRational(Fraction(1))
    return make_shear(target, powers, coefficient, ambient)


def pullback_field(phi: PolyAutomorphism, X: VectorField) -> VectorField:
    """(Φ*X)(p) = DΦ(p)⁻¹ X(Φ(p)), with DΦ(p)⁻¹ = D(Φ⁻¹)(Φ(p)) polynomial."""
    if X.ambient != phi.ambient:
        raise InvalidInput(f"field on {X.ambient}, automorphism on {phi.ambient}")
    images = phi.forward.components
    moved = [c.substitute(images) for c in X.components]
    inverse_jacobian = [[entry.substitute(images) for entry in row] for row in phi.inverse.jacobian()]
    components = []
    for row in inverse_jacobian:
        total = MultiPoly.zero(X.ambient)
        for entry, comp in zip(row, moved):
            if not entry.is_zero() and not comp.is_zero():
                total = total + entry * comp
        components.append(total)
    return VectorField(X.ambient, components)


def pullback_form(phi: PolyAutomorphism, omega: DiffForm) -> DiffForm:
    """Φ*ω = Σ ω_I(Φ) dΦ_{i1} ∧ … ∧ dΦ_{ik}."""
    if omega.ambient != phi.ambient:
        raise InvalidInput(f"form on {omega.ambient}, automorphism on {phi.ambient}")
    images = phi.forward.components
    differentials = [exterior_derivative(DiffForm.function(c)) for c in images]
    result = DiffForm.zero(omega.ambient, omega.degree)
    for index, coef in omega.items():
        term = DiffForm.function(coef.substitute(images))
        for i in index:
            term = wedge(term, differentials[i])
        result = result + term
    return result


def pullback_flag(phi: PolyAutomorphism, flag: EngelFlag) -> EngelFlag:
    """Pull back D, rebuild and re-check the flag, and compare W with Φ*W."""
    fields = [pullback_field(phi, X) for X in flag.D.fields]
    result = check_engel(fields)
    if isinstance(result, FlagFailure):
        raise VerificationFailure(f"pulled-back structure fails at stage {result.stage}: {result.detail}")
    if not proportional(result.W, pullback_field(phi, flag.W)):
        raise VerificationFailure("characteristic field of the pullback is not Φ*W")
    return result


# Cartan prolongation


def standard_contact_frame() -> Tuple[VectorField, VectorField, DiffForm]:
    """C1 = ∂_z, C2 = ∂_x + z∂_y spanning ker(dy − z dx)."""
    ambient = CONTACT_AMBIENT
    z = MultiPoly.variable(ambient, "z")
    C1 = VectorField.coordinate(ambient, "z")
    C2 = VectorField.from_mapping(ambient, {"x": 1, "y": z})
    return C1, C2, contact_form(ambient)


def _check_contact_frame(C1: VectorField, C2: VectorField, alpha: DiffForm) -> None:
    ambient = alpha.ambient
    if len(ambient) != 3 or alpha.degree != 1:
        raise InvalidInput("contact data needs a 1-form on a 3-dimensional ambient")
    if C1.ambient != ambient or C2.ambient != ambient:
        raise InvalidInput(f"frame lives on {C1.ambient}, form on {ambient}")
    if wedge(alpha, exterior_derivative(alpha)).is_zero():
        raise InvalidInput(f"{alpha} is not a contact form: α∧dα vanishes identically")
    if not alpha.pair(C1).is_zero() or not alpha.pair(C2).is_zero():
        raise InvalidInput("frame does not lie in ker α")
    if generic_rank([C1, C2]) != 2:
        raise InvalidInput("frame does not span a plane")


def cartan_prolong(
    C1: VectorField, C2: VectorField, alpha: DiffForm, chart: Chart = "0", verify: bool = True
) -> DistributionFrame:
    """The prolonged distribution on one affine chart of P(ker α).

    Chart "0": {∂_t, C1 + t·C2}. Chart "inf": {∂_s, s·C1 + C2}. With
    `verify` the result is checked to be Engel with characteristic field
    the fiber direction.
    """
    _check_contact_frame(C1, C2, alpha)
    ambient = prolongation_ambient(chart)
    fiber_name = FIBER_NAME[chart]
    fiber = MultiPoly.variable(ambient, fiber_name)
    c1, c2 = C1.extend_ambient(ambient), C2.extend_ambient(ambient)
    vertical = VectorField.coordinate(ambient, fiber_name)
    moving = c1 + c2 * fiber if chart == "0" else c1 * fiber + c2
    frame = DistributionFrame([vertical, moving], 2)
    if verify:
        result = check_engel(frame)
        if isinstance(result, FlagFailure):
            raise VerificationFailure(f"prolongation fails at stage {result.stage}: {result.detail}")
        if not proportional(result.W, vertical):
            raise VerificationFailure(f"characteristic field {result.W} is not the fiber direction")
    return frame


def _random_overlap_point(rng: np.random.Generator) -> List[GaussianRational]:
    while True:
        point = [random_gaussian(rng) for _ in range(4)]
        if point[3] != 0:
            return point


def chart_transition_agrees(
    C1: VectorField,
    C2: VectorField,
    alpha: DiffForm,
    samples: int = 8,
    seed: Optional[int] = None,
) -> bool:
    """Compare both chart distributions as 2-planes at random points of the overlap s = 1/t."""
    frame0 = cartan_prolong(C1, C2, alpha, "0", verify=False)
    frame_inf = cartan_prolong(C1, C2, alpha, "inf", verify=False)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        x, y, z, t = _random_overlap_point(rng)
        s = t.inverse()
        # ds = −dt/t² carries chart-0 vectors into chart-inf coordinates
        carried = []
        for X in frame0:
            vx, vy, vz, vt = X.evaluate((x, y, z, t))
            carried.append((vx, vy, vz, -vt * s * s))
        native = [X.evaluate((x, y, z, s)) for X in frame_inf]
        if rank_exact(carried).rank != 2 or rank_exact(carried + native).rank != 2:
            logger.warning("prolongation charts disagree at t = %s", t)
            return False
    return True
