"""Horizontal paths for the standard Engel structure.

With x as parameter a D_st-horizontal curve is the 2-jet (y″, x, y, y′) of a
function y(x), so joining two points means interpolating their 2-jets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .exactnum import GaussianRational, Scalar, as_exact_vector, solve_exact
from .guards import InvalidInput
from .horizontal import DiscModel, HorizontalDisc
from .poly import PolyCurve, UniPoly

logger = logging.getLogger(__name__)

Jet = Tuple[GaussianRational, GaussianRational, GaussianRational]


@dataclass(frozen=True)
class PathSegment:
    """A D_st-horizontal polynomial curve on the real parameter interval [start, end]."""

    curve: PolyCurve
    start: Fraction = Fraction(0)
    end: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        # raises on a non-tangent curve
        HorizontalDisc(self.curve, DiscModel.D)

    def initial(self) -> Tuple[GaussianRational, ...]:
        return self.curve.at(self.start)  # type: ignore[return-value]

    def terminal(self) -> Tuple[GaussianRational, ...]:
        return self.curve.at(self.end)  # type: ignore[return-value]

    def reversed(self) -> PathSegment:
        """Same trace run backwards over the same interval."""
        return PathSegment(self.curve.reparametrize(-1, self.start + self.end), self.start, self.end)


@dataclass(frozen=True)
class HorizontalPath:
    segments: Tuple[PathSegment, ...] = ()
    model: DiscModel = DiscModel.D

    def reversed(self) -> HorizontalPath:
        return HorizontalPath(tuple(s.reversed() for s in reversed(self.segments)), self.model)

    def __len__(self) -> int:
        return len(self.segments)


def jet_lift(yx: UniPoly, x0: Scalar, x1: Scalar) -> PathSegment:
    """t ↦ (y″(x(t)), x(t), y(x(t)), y′(x(t))) with x(t) = x0 + t(x1 − x0)."""
    a, b = as_exact_vector((x0, x1))
    if a == b:
        raise InvalidInput("jet_lift needs x0 ≠ x1")
    x = UniPoly((a, b - a))
    dy = yx.derivative()
    curve = PolyCurve(
        [
            ("w", dy.derivative().compose(x)),
            ("x", x),
            ("y", yx.compose(x)),
            ("z", dy.compose(x)),
        ]
    )
    return PathSegment(curve)


def jet_of(p: Sequence[Scalar]) -> Jet:
    """The 2-jet (y, y′, y″) = (y, z, w) carried by a point (w, x, y, z)."""
    w, _x, y, z = as_exact_vector(p)
    return (y, z, w)


def hermite_polynomial(x0: Scalar, jet0: Sequence[Scalar], x1: Scalar, jet1: Sequence[Scalar]) -> UniPoly:
    """The degree ≤ 5 polynomial y(x) with prescribed (y, y′, y″) at x0 and x1."""
    a, b = as_exact_vector((x0, x1))
    if a == b:
        raise InvalidInput("Hermite interpolation needs distinct nodes")
    y0, dy0, ddy0 = as_exact_vector(jet0)
    y1, dy1, ddy1 = as_exact_vector(jet1)
    h = b - a
    # in s = x − x0 the first three coefficients are read off the jet at x0
    low = [y0, dy0, ddy0 / 2]
    rhs = [
        y1 - (low[0] + low[1] * h + low[2] * h**2),
        dy1 - (low[1] + 2 * low[2] * h),
        ddy1 - 2 * low[2],
    ]
    system = [
        [h**3, h**4, h**5],
        [3 * h**2, 4 * h**3, 5 * h**4],
        [6 * h, 12 * h**2, 20 * h**3],
    ]
    high = solve_exact(system, rhs)
    in_s = UniPoly(low + high)
    return in_s.compose(UniPoly((-a, 1)))


def _average(j0: Jet, j1: Jet) -> Jet:
    return tuple((u + v) / 2 for u, v in zip(j0, j1))  # type: ignore[return-value]


def hermite_steer(p: Sequence[Scalar], q: Sequence[Scalar]) -> HorizontalPath:
    """A D_st-horizontal path from p to q with exact endpoints.

    Distinct x-coordinates give one quintic jet lift; equal ones detour
    through x_p + 1 with the averaged jet.
    """
    start, end = as_exact_vector(p), as_exact_vector(q)
    if len(start) != 4 or len(end) != 4:
        raise InvalidInput("endpoints need four coordinates (w, x, y, z)")
    if start == end:
        return HorizontalPath()
    xp, xq = start[1], end[1]
    jp, jq = jet_of(start), jet_of(end)
    if xp != xq:
        return HorizontalPath((jet_lift(hermite_polynomial(xp, jp, xq, jq), xp, xq),))
    xm = xp + 1
    jm = _average(jp, jq)
    logger.debug("equal x-coordinates, detouring through x = %s", xm)
    first = jet_lift(hermite_polynomial(xp, jp, xm, jm), xp, xm)
    second = jet_lift(hermite_polynomial(xm, jm, xq, jq), xm, xq)
    return HorizontalPath((first, second))


def path_endpoint_check(path: HorizontalPath, p: Sequence[Scalar], q: Sequence[Scalar]) -> bool:
    """Exact endpoint and continuity check."""
    start, end = as_exact_vector(p), as_exact_vector(q)
    if not path.segments:
        return start == end
    if path.segments[0].initial() != start or path.segments[-1].terminal() != end:
        return False
    return all(a.terminal() == b.initial() for a, b in zip(path.segments, path.segments[1:]))
