"""The finite obstruction separating the structures indexed by R.

An affine map h(ζ) = aζ + b sending {0, 1, Ri} onto {0, 1, R′i} exists only
for R = R′; the sets V_R and C_R are the loci the transported structures
are built around.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .exactnum import IMAG_UNIT, GaussianRational, Scalar, as_exact_vector, checked_complex
from .guards import InvalidInput

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction, str]
PERMUTATIONS: Tuple[Tuple[int, int, int], ...] = tuple(itertools.permutations(range(3)))  # type: ignore[assignment]


@dataclass(frozen=True)
class TripleSet:
    elements: Tuple[GaussianRational, GaussianRational, GaussianRational]

    def __post_init__(self) -> None:
        values = as_exact_vector(self.elements)
        if len(values) != 3:
            raise InvalidInput(f"a triple needs three elements, got {len(values)}")
        if len(set(values)) != 3:
            raise InvalidInput(f"triple elements must be distinct: {[str(v) for v in values]}")
        object.__setattr__(self, "elements", values)

    @classmethod
    def standard(cls, R: RationalLike) -> TripleSet:
        """{0, 1, R·i}."""
        r = _rational(R)
        return cls((GaussianRational(), GaussianRational(Fraction(1)), IMAG_UNIT * r))

    def __iter__(self):
        return iter(self.elements)

    def __str__(self) -> str:
        return "{" + ", ".join(str(e) for e in self.elements) + "}"


@dataclass(frozen=True)
class AffineWitness:
    """h(ζ) = aζ + b with h(source[k]) = target[permutation[k]]."""

    a: GaussianRational
    b: GaussianRational
    permutation: Tuple[int, int, int]

    def __call__(self, zeta: Scalar) -> GaussianRational:
        return self.a * zeta + self.b

    def inverse(self) -> AffineWitness:
        inv = self.a.inverse()
        back = [0, 0, 0]
        for k, j in enumerate(self.permutation):
            back[j] = k
        return AffineWitness(inv, -self.b * inv, tuple(back))  # type: ignore[arg-type]

    def to_dict(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "permutation": list(self.permutation)}


def affine_bijection_exists(S: TripleSet, S_prime: TripleSet) -> Optional[AffineWitness]:
    """First affine bijection S → S′ in permutation order, or None."""
    s = S.elements
    for perm in PERMUTATIONS:
        t = [S_prime.elements[j] for j in perm]
        # two constraints fix (a, b); s0 ≠ s1 in a valid triple
        a = (t[1] - t[0]) / (s[1] - s[0])
        b = t[0] - a * s[0]
        if a == 0:
            continue
        if a * s[2] + b == t[2]:
            return AffineWitness(a, b, perm)
    return None


def _rational(R: RationalLike) -> Fraction:
    value = Fraction(R)
    if value == 0:
        raise InvalidInput("R must be nonzero")
    return value


def vr_membership(R: RationalLike, p: Sequence[Scalar]) -> bool:
    """x-coordinate of p lies in {0, 1, R·i}."""
    r = _rational(R)
    values = as_exact_vector(p)
    if len(values) != 4:
        raise InvalidInput("V_R points need four coordinates (w, x, y, z)")
    x = values[1]
    return x in (0, 1) or x == IMAG_UNIT * r


def cr_membership(R: RationalLike, p: Sequence[Scalar]) -> bool:
    """(u, v) ∈ (C × {0, 1, R·i}) ∪ ({0} × C)."""
    r = _rational(R)
    values = as_exact_vector(p)
    if len(values) != 2:
        raise InvalidInput("C_R points need two coordinates")
    u, v = values
    return u == 0 or v in (0, 1) or v == IMAG_UNIT * r


@dataclass(frozen=True)
class FloatMembership:
    inside: bool
    exact: bool = False
    distance: float = 0.0


def vr_membership_float(R: float, p: Sequence[complex], tolerance: float = 1e-9) -> FloatMembership:
    """Membership for irrational R within tolerance; never reported as exact."""
    if R == 0:
        raise InvalidInput("R must be nonzero")
    if len(p) != 4:
        raise InvalidInput("V_R points need four coordinates (w, x, y, z)")
    x = checked_complex(p[1])
    distance = min(abs(x), abs(x - 1), abs(x - 1j * R))
    return FloatMembership(distance <= tolerance, False, distance)
