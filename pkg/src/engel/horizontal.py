"""Curves tangent to the standard flag and to Cartan prolongation charts."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from .distcalc import DiffForm
from .exactnum import GaussianRational, Scalar, as_exact_vector
from .guards import InvalidInput, NotInDistribution, VerificationFailure
from .poly import STANDARD_AMBIENT, MultiPoly, PolyCurve, UniPoly, antiderivative_zeta

logger = logging.getLogger(__name__)

CONTACT_AMBIENT: Tuple[str, ...] = ("x", "y", "z")
Chart = Literal["0", "inf"]
FIBER_NAME: Dict[str, str] = {"0": "t", "inf": "s"}


class DiscModel(str, enum.Enum):
    """Which distribution a disc is tangent to."""

    W = "W-of-standard"
    D = "D-of-standard"
    E = "E-of-standard"
    GENERAL = "general"


def standard_forms(ambient: Sequence[str] = STANDARD_AMBIENT) -> Dict[DiscModel, Tuple[DiffForm, ...]]:
    """Defining 1-forms of D_st, E_st and W_st on (w, x, y, z)."""
    w, z = (MultiPoly.variable(ambient, a) for a in ("w", "z"))
    contact = DiffForm.one_form(ambient, {"y": 1, "x": -z})
    engel = DiffForm.one_form(ambient, {"z": 1, "x": -w})
    return {
        DiscModel.D: (contact, engel),
        DiscModel.E: (contact,),
        DiscModel.W: tuple(DiffForm.dx(ambient, a) for a in ("x", "y", "z")),
    }


def contact_form(ambient: Sequence[str] = CONTACT_AMBIENT) -> DiffForm:
    """dy − z dx."""
    return DiffForm.one_form(ambient, {"y": 1, "x": -MultiPoly.variable(ambient, "z")})


def prolongation_ambient(chart: Chart) -> Tuple[str, ...]:
    if chart not in FIBER_NAME:
        raise InvalidInput(f"unknown prolongation chart {chart!r}")
    return CONTACT_AMBIENT + (FIBER_NAME[chart],)


def prolongation_forms(chart: Chart) -> Tuple[DiffForm, ...]:
    """Forms cutting out the prolonged distribution on one chart.

    Chart "0" parametrizes lines spanned by ∂_z + t(∂_x + z∂_y), chart "inf"
    lines spanned by s∂_z + ∂_x + z∂_y.
    """
    ambient = prolongation_ambient(chart)
    z = MultiPoly.variable(ambient, "z")
    fiber = MultiPoly.variable(ambient, FIBER_NAME[chart])
    if chart == "0":
        second = DiffForm.one_form(ambient, {"x": 1, "z": -fiber})
    else:
        second = DiffForm.one_form(ambient, {"z": 1, "x": -fiber})
    return (DiffForm.one_form(ambient, {"y": 1, "x": -z}), second)


@dataclass(frozen=True)
class TangencyReport:
    """Residuals ω(f′(ζ)) for each form that does not vanish identically."""

    ok: bool
    residuals: Tuple[Tuple[str, UniPoly], ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, object]:
        return {"ok": self.ok, "residuals": {name: str(r) for name, r in self.residuals}}


def verify_tangency(curve: PolyCurve, forms: Sequence[DiffForm]) -> TangencyReport:
    """Exact check that every form vanishes on the curve's velocity."""
    residuals: List[Tuple[str, UniPoly]] = []
    for form in forms:
        if form.degree != 1:
            raise InvalidInput(f"tangency needs 1-forms, got degree {form.degree}")
        missing = [a for a in form.ambient if a not in curve.ambient]
        if missing:
            raise InvalidInput(f"curve lacks coordinates {missing}")
        residual = form.pull_along(curve)
        if not residual.is_zero():
            residuals.append((str(form), residual))
    return TangencyReport(not residuals, tuple(residuals))


@dataclass(frozen=True)
class HorizontalDisc:
    """A polynomial disc together with the distribution it is tangent to.

    Construction re-checks tangency exactly; constant curves are kept but
    marked degenerate.
    """

    curve: PolyCurve
    model: DiscModel
    forms: Tuple[DiffForm, ...] = ()
    degenerate: bool = field(default=False)

    def __post_init__(self) -> None:
        if self.model != DiscModel.GENERAL and not self.forms:
            object.__setattr__(self, "forms", standard_forms()[self.model])
        if self.model != DiscModel.GENERAL and self.curve.ambient != STANDARD_AMBIENT:
            raise InvalidInput(f"standard-model discs live on {STANDARD_AMBIENT}, got {self.curve.ambient}")
        report = verify_tangency(self.curve, self.forms)
        if not report.ok:
            raise VerificationFailure(f"disc is not tangent: {report.to_dict()['residuals']}")
        if self.curve.is_constant() and not self.degenerate:
            object.__setattr__(self, "degenerate", True)

    @property
    def basepoint(self) -> Tuple[GaussianRational, ...]:
        return self.curve.basepoint()

    @property
    def velocity(self) -> Tuple[GaussianRational, ...]:
        return self.curve.velocity_at_zero()

    def component(self, name: str) -> UniPoly:
        return self.curve[name]


def _standard_curve(w: UniPoly, x: UniPoly, y: UniPoly, z: UniPoly) -> PolyCurve:
    return PolyCurve([("w", w), ("x", x), ("y", y), ("z", z)])


def integrate_horizontal_D(w: UniPoly, x: UniPoly, y0: Scalar, z0: Scalar) -> HorizontalDisc:
    """Solve z′ = w x′, y′ = z x′ with z(0) = z0, y(0) = y0."""
    dx = x.derivative()
    z = antiderivative_zeta(w * dx) + z0
    y = antiderivative_zeta(z * dx) + y0
    return HorizontalDisc(_standard_curve(w, x, y, z), DiscModel.D)


def integrate_horizontal_E(w: UniPoly, x: UniPoly, z: UniPoly, y0: Scalar) -> HorizontalDisc:
    """Solve y′ = z x′ with y(0) = y0; w and z are free."""
    y = antiderivative_zeta(z * x.derivative()) + y0
    return HorizontalDisc(_standard_curve(w, x, y, z), DiscModel.E)


def w_line(w: UniPoly, base: Sequence[Scalar]) -> HorizontalDisc:
    """The W-line ζ ↦ (w(ζ), x0, y0, z0)."""
    x0, y0, z0 = as_exact_vector(base)
    return HorizontalDisc(
        _standard_curve(w, UniPoly.constant(x0), UniPoly.constant(y0), UniPoly.constant(z0)), DiscModel.W
    )


def in_standard_d(p: Sequence[Scalar], v: Sequence[Scalar]) -> Optional[str]:
    """Name the violated relation when v ∉ D_p, else None."""
    w0, _x0, _y0, z0 = as_exact_vector(p)
    _vw, vx, vy, vz = as_exact_vector(v)
    if vy != z0 * vx:
        return "v_y = z0·v_x"
    if vz != w0 * vx:
        return "v_z = w0·v_x"
    return None


def remark_line(p: Sequence[Scalar], v: Sequence[Scalar]) -> HorizontalDisc:
    """The explicit cubic D_st-line through p with velocity v."""
    if len(p) != 4 or len(v) != 4:
        raise InvalidInput("point and vector need four coordinates (w, x, y, z)")
    violated = in_standard_d(p, v)
    if violated is not None:
        raise NotInDistribution(f"v is not in D_p: {violated} fails")
    w0, x0, y0, z0 = as_exact_vector(p)
    vw, vx, vy, vz = as_exact_vector(v)
    curve = _standard_curve(
        UniPoly((w0, vw)),
        UniPoly((x0, vx)),
        UniPoly((y0, vy, vx * vz / 2, vx * vx * vw / 6)),
        UniPoly((z0, vz, vx * vw / 2)),
    )
    degenerate = not any((vw, vx, vy, vz))
    if degenerate:
        logger.warning("remark_line with zero velocity at %s returns a constant disc", p)
    return HorizontalDisc(curve, DiscModel.D, degenerate=degenerate)


def reparametrize(disc: HorizontalDisc, a: Scalar, b: Scalar = 0) -> HorizontalDisc:
    """ζ ↦ f(aζ + b), tangent to the same distribution."""
    return HorizontalDisc(disc.curve.reparametrize(a, b), disc.model, disc.forms, disc.degenerate)


# prolongation charts


def project_prolongation(curve: PolyCurve, fiber: Optional[str] = None) -> PolyCurve:
    """Drop the fiber coordinate of a curve in a prolongation chart."""
    if fiber is None:
        fiber = next((f for f in ("t", "s") if f in curve.ambient), None)
    if fiber is None or fiber not in curve.ambient:
        raise InvalidInput(f"curve on {curve.ambient} has no fiber coordinate")
    return curve.drop(fiber)


def integrate_prolonged(fiber: UniPoly, driver: UniPoly, start: Sequence[Scalar], chart: Chart = "0") -> HorizontalDisc:
    """Build a curve tangent to the prolonged distribution from free data.

    Chart "0": `driver` is z(ζ), `start` is (x0, y0) and x = x0 + ∫ t z′.
    Chart "inf": `driver` is x(ζ), `start` is (z0, y0) and z = z0 + ∫ s x′.
    In both y = y0 + ∫ z x′.
    """
    ambient = prolongation_ambient(chart)
    first, y0 = as_exact_vector(start)
    if chart == "0":
        z = driver
        x = antiderivative_zeta(fiber * z.derivative()) + first
    else:
        x = driver
        z = antiderivative_zeta(fiber * x.derivative()) + first
    y = antiderivative_zeta(z * x.derivative()) + y0
    curve = PolyCurve([("x", x), ("y", y), ("z", z), (ambient[3], fiber)])
    return HorizontalDisc(curve, DiscModel.GENERAL, prolongation_forms(chart))


def prolongation_lift(curve: PolyCurve, chart: Chart = "inf") -> HorizontalDisc:
    """Lift a Legendrian polynomial curve by its tangent line.

    The fiber coordinate is z′/x′ on chart "inf" and x′/z′ on chart "0";
    the quotient must be polynomial.
    """
    if curve.ambient != CONTACT_AMBIENT:
        raise InvalidInput(f"Legendrian curves live on {CONTACT_AMBIENT}, got {curve.ambient}")
    if not verify_tangency(curve, [contact_form()]).ok:
        raise NotInDistribution("curve is not Legendrian for dy − z dx")
    dx, dz = curve["x"].derivative(), curve["z"].derivative()
    numerator, denominator = (dz, dx) if chart == "inf" else (dx, dz)
    if denominator.is_zero():
        raise InvalidInput(f"tangent line leaves chart {chart!r}")
    quotient, remainder = numerator.divmod(denominator)
    if not remainder.is_zero():
        raise InvalidInput(f"fiber coordinate is not polynomial on chart {chart!r}")
    ambient = prolongation_ambient(chart)
    lifted = PolyCurve(list(curve.items()) + [(ambient[3], quotient)])
    return HorizontalDisc(lifted, DiscModel.GENERAL, prolongation_forms(chart))
