"""Obstacle shell sets, exact membership and certified disc avoidance.

Shells are unions of layers: a block of coordinates whose polydisc modulus
max|·| lies in a radius interval, times caps |c| ≤ C_i on other
coordinates. Radii are powers of two so exact membership never needs a
square root.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .config import get_config
from .exactnum import (
    GaussianRational,
    Ordering,
    Scalar,
    as_exact_vector,
    checked_complex,
    cmp_abs_to_dyadic,
    cmp_abs_to_rational,
    dyadic,
)
from .guards import InvalidInput, VerificationFailure
from .horizontal import HorizontalDisc
from .poly import STANDARD_AMBIENT, PolyCurve, UniPoly, derivative_coefficient_bound, sup_on_circle

logger = logging.getLogger(__name__)

Point = Sequence[Union[Scalar, complex, float, str]]


class ShellKind(str, enum.Enum):
    A = "A"
    B = "B"
    K3 = "K3"
    KW = "KW"
    LN = "Ln"
    CR = "CR"


# native coordinates of each kind; the rest of (w, x, y, z) is free
NATIVE_AMBIENT: Dict[ShellKind, Tuple[str, ...]] = {
    ShellKind.A: STANDARD_AMBIENT,
    ShellKind.B: STANDARD_AMBIENT,
    ShellKind.K3: ("w", "x", "y"),
    ShellKind.KW: ("w", "y", "z"),
    ShellKind.LN: STANDARD_AMBIENT,
    ShellKind.CR: ("w", "x"),
}


@dataclass(frozen=True)
class Layer:
    """Layer i: inner ≤ max|block| ≤ outer and |c| ≤ cap for each cap."""

    index: int
    block: Tuple[str, ...]
    inner: Fraction
    outer: Fraction
    caps: Tuple[Tuple[str, Fraction], ...]


@dataclass(frozen=True)
class ShellSet:
    """One of the obstacle families A, B, K3, KW, L_n, C_R."""

    kind: ShellKind
    epsilon: Fraction = Fraction(1, 2)
    n: Optional[int] = None
    R: Optional[Fraction] = None
    separated: bool = field(default=True, init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ShellKind(self.kind))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.kind == ShellKind.K3:
            if not Fraction(0) < self.epsilon <= Fraction(1, 2):
                raise InvalidInput(f"K3 needs 0 < ε ≤ 1/2, got {self.epsilon}")
            if self.epsilon == Fraction(1, 2):
                # b_1 = a_2 = 3/2
                object.__setattr__(self, "separated", False)
                logger.warning("K3 with ε = 1/2 has touching annuli; membership reports the lowest layer")
        if self.kind == ShellKind.LN and self.n is not None and self.n < 1:
            raise InvalidInput(f"L_n needs n ≥ 1, got {self.n}")
        if self.kind == ShellKind.CR:
            if self.R is None or Fraction(self.R) == 0:
                raise InvalidInput("C_R needs a nonzero real R")
            object.__setattr__(self, "R", Fraction(self.R))

    @classmethod
    def a(cls) -> ShellSet:
        return cls(ShellKind.A)

    @classmethod
    def b(cls) -> ShellSet:
        return cls(ShellKind.B)

    @classmethod
    def k3(cls, epsilon: Union[Fraction, str] = Fraction(1, 2)) -> ShellSet:
        return cls(ShellKind.K3, epsilon=Fraction(epsilon))

    @classmethod
    def kw(cls) -> ShellSet:
        return cls(ShellKind.KW)

    @classmethod
    def ln(cls, n: Optional[int]) -> ShellSet:
        return cls(ShellKind.LN, n=n)

    @classmethod
    def cr(cls, R: Union[Fraction, int, str]) -> ShellSet:
        return cls(ShellKind.CR, R=Fraction(R))

    @classmethod
    def from_descriptor(cls, descriptor: Mapping[str, object]) -> ShellSet:
        kind = ShellKind(str(descriptor.get("kind")))
        n = descriptor.get("n")
        R = descriptor.get("R")
        return cls(
            kind,
            epsilon=Fraction(str(descriptor.get("epsilon", "1/2"))),
            n=int(n) if n is not None else None,  # type: ignore[call-overload]
            R=Fraction(str(R)) if R is not None else None,
        )

    def descriptor(self) -> Dict[str, object]:
        out: Dict[str, object] = {"kind": self.kind.value}
        if self.kind == ShellKind.K3:
            out["epsilon"] = str(self.epsilon)
            out["separated"] = self.separated
        if self.kind == ShellKind.LN:
            out["n"] = self.n
        if self.kind == ShellKind.CR:
            out["R"] = str(self.R)
        return out

    @property
    def is_layered(self) -> bool:
        return self.kind in (ShellKind.A, ShellKind.B, ShellKind.K3, ShellKind.KW)

    def layer(self, i: int) -> Layer:
        if not self.is_layered:
            raise InvalidInput(f"{self.kind.value} is not a layered shell")
        if i < 1:
            raise InvalidInput("layers are numbered from 1")
        radius = dyadic(i - 1)
        if self.kind == ShellKind.A:
            return Layer(i, ("w", "x", "z"), radius, radius, (("y", dyadic(3 * i + 1)),))
        if self.kind == ShellKind.B:
            return Layer(i, ("w", "x"), radius, radius, (("y", dyadic(5 * i + 2)), ("z", dyadic(3 * i + 1))))
        if self.kind == ShellKind.K3:
            return Layer(i, ("w", "x"), radius - self.epsilon, radius + self.epsilon, (("y", dyadic(5 * i + 2)),))
        return Layer(i, ("w", "y"), radius, radius, (("z", dyadic(i)),))

    def layers_up_to(self, modulus: float) -> Iterator[Layer]:
        """Layers whose inner radius does not exceed `modulus`."""
        i = 1
        while True:
            layer = self.layer(i)
            if float(layer.inner) > modulus:
                return
            yield layer
            i += 1


@dataclass(frozen=True)
class Membership:
    inside: bool
    layer: Optional[int] = None

    def __bool__(self) -> bool:
        return self.inside


def _named_point(S: ShellSet, p: Point) -> Dict[str, object]:
    native = NATIVE_AMBIENT[S.kind]
    if len(p) == len(STANDARD_AMBIENT):
        names: Tuple[str, ...] = STANDARD_AMBIENT
    elif len(p) == len(native):
        names = native
    else:
        raise InvalidInput(f"{S.kind.value} takes points on {native} or {STANDARD_AMBIENT}, got {len(p)} coordinates")
    return dict(zip(names, p))


def _is_exact_point(values: Sequence[object]) -> bool:
    return all(isinstance(v, (GaussianRational, int, Fraction, str)) and not isinstance(v, bool) for v in values)


def shell_membership(S: ShellSet, p: Point, tolerance: Optional[float] = None) -> Membership:
    """Decide p ∈ S; the lowest matching layer is the witness.

    Exact points are decided exactly; float points use a relative tolerance
    on the modulus equalities.
    """
    named = _named_point(S, p)
    if _is_exact_point(list(named.values())):
        exact = dict(zip(named, as_exact_vector(named.values())))  # type: ignore[arg-type]
        return _exact_membership(S, exact)
    tau = get_config().get_float_tolerance() if tolerance is None else tolerance
    floats = {k: checked_complex(v) for k, v in named.items()}  # type: ignore[arg-type]
    return _float_membership(S, floats, tau)


def _exact_membership(S: ShellSet, p: Mapping[str, GaussianRational]) -> Membership:
    if S.kind == ShellKind.LN:
        x = p["x"]
        if S.n is None:
            return Membership(True, 1)
        if x.im == 0 and x.re.denominator == 1 and 1 <= x.re <= S.n:
            return Membership(True, int(x.re))
        return Membership(False)
    if S.kind == ShellKind.CR:
        assert S.R is not None
        for index, value in enumerate((GaussianRational(0), GaussianRational(1), GaussianRational(0, S.R)), start=1):
            if p["x"] == value:
                return Membership(True, index)
        return Membership(True, 4) if p["w"] == 0 else Membership(False)

    block_sq = max(p[c].abs2() for c in S.layer(1).block)
    i = 1
    while True:
        layer = S.layer(i)
        if layer.inner * layer.inner > block_sq:
            return Membership(False)
        # squared radii are exact, so the shell equality needs no rounding
        in_block = block_sq <= layer.outer * layer.outer
        caps_ok = all(cmp_abs_to_rational(p[c], cap) != Ordering.GREATER for c, cap in layer.caps)
        if in_block and caps_ok:
            return Membership(True, i)
        i += 1


def _float_membership(S: ShellSet, p: Mapping[str, complex], tau: float) -> Membership:
    if S.kind == ShellKind.LN:
        x = p["x"]
        if S.n is None:
            return Membership(True, 1)
        k = round(x.real)
        if 1 <= k <= S.n and abs(x - k) <= tau * max(1.0, abs(k)):
            return Membership(True, int(k))
        return Membership(False)
    if S.kind == ShellKind.CR:
        assert S.R is not None
        for index, value in enumerate((0j, 1 + 0j, complex(0, float(S.R))), start=1):
            if abs(p["x"] - value) <= tau * max(1.0, abs(value)):
                return Membership(True, index)
        return Membership(True, 4) if abs(p["w"]) <= tau else Membership(False)

    modulus = max(abs(p[c]) for c in S.layer(1).block)
    for layer in S.layers_up_to(modulus * (1 + tau) + tau):
        inner, outer = float(layer.inner), float(layer.outer)
        in_block = inner * (1 - tau) <= modulus <= outer * (1 + tau)
        caps_ok = all(abs(p[c]) <= float(cap) * (1 + tau) for c, cap in layer.caps)
        if in_block and caps_ok:
            return Membership(True, layer.index)
    return Membership(False)


# disc avoidance


class AvoidanceStatus(str, enum.Enum):
    CERTIFIED = "Certified"
    INTERSECTS = "Intersects"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class AvoidanceResult:
    status: AvoidanceStatus
    witness: Optional[complex] = None
    layer: Optional[int] = None
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.status == AvoidanceStatus.CERTIFIED

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {"status": self.status.value, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = [self.witness.real, self.witness.imag]
        if self.layer is not None:
            out["layer"] = self.layer
        return out


@dataclass
class AvoidanceSettings:
    """Grid resolution for the avoidance certificate."""

    radial_levels: int = 16
    angular_samples: int = 64
    refinements: int = 2
    tolerance: float = 1e-9

    @classmethod
    def from_config(cls) -> AvoidanceSettings:
        config = get_config()
        return cls(**config.get_avoidance_settings(), tolerance=config.get_float_tolerance())


def _coefficients(disc: Union[HorizontalDisc, PolyCurve]) -> Dict[str, np.ndarray]:
    curve = disc.curve if isinstance(disc, HorizontalDisc) else disc
    return curve.to_numpy()


def disc_avoids(
    S: ShellSet,
    disc: Union[HorizontalDisc, PolyCurve],
    radius: float = 1.0,
    settings: Optional[AvoidanceSettings] = None,
) -> AvoidanceResult:
    """Certify that f(|ζ| ≤ radius) misses S, or find a witness ζ."""
    if not 0 < radius <= 1:
        raise InvalidInput(f"radius must lie in (0, 1], got {radius}")
    return disc_avoids_coefficients(S, _coefficients(disc), radius, settings or AvoidanceSettings.from_config())


def disc_avoids_coefficients(
    S: ShellSet, coeffs: Mapping[str, np.ndarray], radius: float, settings: AvoidanceSettings
) -> AvoidanceResult:
    """Float core of `disc_avoids` on complex coefficient arrays (low degree first)."""
    missing = [c for c in NATIVE_AMBIENT[S.kind] if c not in coeffs]
    if missing:
        raise InvalidInput(f"disc lacks coordinates {missing}")
    if S.kind == ShellKind.LN:
        return _avoid_values(coeffs["x"], _ln_values(S), radius, settings.tolerance, "x", start=1)
    if S.kind == ShellKind.CR:
        assert S.R is not None
        result = _avoid_values(coeffs["x"], [0j, 1 + 0j, complex(0, float(S.R))], radius, settings.tolerance, "x", start=1)
        if result.status != AvoidanceStatus.CERTIFIED:
            return result
        w_result = _avoid_values(coeffs["w"], [0j], radius, settings.tolerance, "w", start=4)
        return w_result
    return _avoid_layers(S, coeffs, radius, settings)


def _ln_values(S: ShellSet) -> Optional[List[complex]]:
    return None if S.n is None else [complex(k) for k in range(1, S.n + 1)]


def _avoid_values(
    coeff: np.ndarray, values: Optional[List[complex]], radius: float, tau: float, name: str, start: int
) -> AvoidanceResult:
    """Decide whether a coordinate takes one of finitely many values on the disc."""
    if values is None:
        return AvoidanceResult(AvoidanceStatus.INTERSECTS, 0j, 1, "L_∞ is everything")
    coeff = np.trim_zeros(np.asarray(coeff, dtype=complex), "b")
    unresolved = False
    for index, value in enumerate(values, start=start):
        shifted = coeff.copy() if coeff.size else np.zeros(1, dtype=complex)
        shifted[0] -= value
        if np.count_nonzero(shifted[1:]) == 0:
            if abs(shifted[0]) <= tau * max(1.0, abs(value)):
                return AvoidanceResult(AvoidanceStatus.INTERSECTS, 0j, index, f"{name} ≡ {value}")
            continue
        roots = np.polynomial.polynomial.polyroots(shifted)
        for root in sorted(roots, key=abs):
            if abs(root) <= radius * (1 - tau):
                return AvoidanceResult(AvoidanceStatus.INTERSECTS, complex(root), index, f"{name} = {value}")
            if abs(root) <= radius * (1 + tau):
                unresolved = True
    if unresolved:
        return AvoidanceResult(AvoidanceStatus.UNKNOWN, detail="root on the boundary circle within tolerance")
    return AvoidanceResult(AvoidanceStatus.CERTIFIED, detail=f"{name} avoids the excluded values")


def _polyval(coeff: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(zeta, coeff)


def _cap_lower_bound(coeff: np.ndarray, radius: float) -> float:
    """Certified lower bound of |c(ζ)| on the closed disc."""
    centered = np.array(coeff, dtype=complex)
    c0 = centered[0] if centered.size else 0j
    if centered.size <= 1:
        return abs(c0)
    centered[0] = 0
    return abs(c0) - sup_on_circle(centered, radius).certified_upper


def _avoid_layers(
    S: ShellSet, coeffs: Mapping[str, np.ndarray], radius: float, settings: AvoidanceSettings
) -> AvoidanceResult:
    tau = settings.tolerance
    block = S.layer(1).block
    block_sup = max(sup_on_circle(coeffs[c], radius).certified_upper for c in block)
    first = S.layer(1)
    if block_sup < float(first.inner):
        return AvoidanceResult(AvoidanceStatus.CERTIFIED, detail=f"block modulus ≤ {block_sup:.6g} below every shell")

    pending: List[Layer] = []
    for layer in S.layers_up_to(block_sup):
        if any(_cap_lower_bound(coeffs[c], radius) > float(cap) for c, cap in layer.caps):
            continue
        pending.append(layer)
    if not pending:
        return AvoidanceResult(AvoidanceStatus.CERTIFIED, detail="every reachable layer is excluded by its cap")

    names = sorted({*block, *(c for layer in pending for c, _ in layer.caps)})
    lipschitz = max(derivative_coefficient_bound(coeffs[c], radius) for c in names)
    levels, angles = settings.radial_levels, settings.angular_samples
    for round_index in range(settings.refinements + 1):
        rho = radius * np.arange(levels + 1) / levels
        theta = 2.0 * np.pi * np.arange(angles) / angles
        grid = rho[:, None] * np.exp(1j * theta)[None, :]
        values = {c: _polyval(coeffs[c], grid) for c in names}
        modulus = np.max(np.stack([np.abs(values[c]) for c in block]), axis=0)
        step = radius / (2 * levels) + np.pi * radius / angles

        still: List[Layer] = []
        for layer in pending:
            inner, outer = float(layer.inner), float(layer.outer)
            block_gap = np.maximum(np.maximum(inner - modulus, modulus - outer), 0.0)
            cap_gap = np.zeros_like(modulus)
            for c, cap in layer.caps:
                cap_gap = np.maximum(cap_gap, np.abs(values[c]) - float(cap))
            margin = np.maximum(block_gap, cap_gap)

            inside = (block_gap <= tau * outer) & (cap_gap <= 0)
            if inside.any():
                k, j = np.argwhere(inside)[0]
                return AvoidanceResult(AvoidanceStatus.INTERSECTS, complex(grid[k, j]), layer.index, "grid point on the shell")
            witness = _radial_crossing(coeffs, block, layer, rho, theta, modulus, values, tau)
            if witness is not None:
                return AvoidanceResult(AvoidanceStatus.INTERSECTS, witness, layer.index, "shell crossing located by bisection")
            if float(margin.min()) > lipschitz * step + tau * outer:
                continue
            still.append(layer)
        if not still:
            return AvoidanceResult(AvoidanceStatus.CERTIFIED, detail=f"grid margin certified after {round_index} refinements")
        pending = still
        logger.debug("avoidance round %d left %d layers unresolved", round_index, len(pending))
        levels, angles = levels * 2, angles * 2
    return AvoidanceResult(AvoidanceStatus.UNKNOWN, detail=f"{len(pending)} layers unresolved at the finest grid")


def _radial_crossing(
    coeffs: Mapping[str, np.ndarray],
    block: Tuple[str, ...],
    layer: Layer,
    rho: np.ndarray,
    theta: np.ndarray,
    modulus: np.ndarray,
    values: Mapping[str, np.ndarray],
    tau: float,
) -> Optional[complex]:
    """Bisect along a ray where the block modulus crosses the layer radius with caps satisfied."""
    target = float(layer.outer if layer.inner == layer.outer else (layer.inner + layer.outer) / 2)
    caps_ok = np.ones_like(modulus, dtype=bool)
    for c, cap in layer.caps:
        caps_ok &= np.abs(values[c]) < float(cap)
    sign = modulus - target
    crossings = (sign[:-1, :] * sign[1:, :] < 0) & caps_ok[:-1, :] & caps_ok[1:, :]
    for k, j in np.argwhere(crossings):
        direction = np.exp(1j * theta[j])

        def gap(s: float) -> float:
            zeta = s * direction
            return max(abs(_polyval(coeffs[c], zeta)) for c in block) - target

        s_star = optimize.brentq(gap, float(rho[k]), float(rho[k + 1]), xtol=1e-15, rtol=1e-14)
        zeta = complex(s_star * direction)
        if all(abs(_polyval(coeffs[c], zeta)) <= float(cap) * (1 + tau) for c, cap in layer.caps):
            return zeta
    return None


# W-lines and E-lines


@dataclass(frozen=True)
class WLineWitness:
    zeta: complex
    layer: int
    modulus: float
    target: float


def _wline_layer(w0: GaussianRational, y0: GaussianRational, z0: GaussianRational) -> int:
    i = 1
    while True:
        if (
            cmp_abs_to_dyadic(y0, i - 1) == Ordering.LESS
            and cmp_abs_to_dyadic(z0, i) != Ordering.GREATER
            and cmp_abs_to_dyadic(w0, i - 1) == Ordering.LESS
        ):
            return i
        i += 1


def wline_shell_intersection(
    w: UniPoly, base: Sequence[Scalar], S: Optional[ShellSet] = None, tolerance: float = 1e-9
) -> WLineWitness:
    """Locate ζ where the W-line (w(ζ), x0, y0, z0) meets a K_W layer.

    The layer is the smallest i with 2^{i−1} > |y0|, 2^{i−1} > |w(0)| and
    2^i ≥ |z0|; the radius r with max_{|ζ|=r} |w| = 2^{i−1} is found by
    Brent's method and the crossing is polished along the argmax ray.
    """
    if S is not None and S.kind != ShellKind.KW:
        raise InvalidInput(f"W-lines are tested against K_W, got {S.kind.value}")
    if w.is_constant():
        raise InvalidInput("wline_shell_intersection needs a nonconstant w")
    _x0, y0, z0 = as_exact_vector(base)
    layer = _wline_layer(w.coefficient(0), y0, z0)
    target = float(dyadic(layer - 1))
    coeffs = w.to_numpy()
    samples = max(256, 32 * w.degree())
    theta = 2.0 * np.pi * np.arange(samples) / samples
    ring = np.exp(1j * theta)

    def max_modulus(r: float) -> float:
        return float(np.abs(_polyval(coeffs, r * ring)).max()) - target

    upper = 1.0
    while max_modulus(upper) < 0:
        upper *= 2.0
    r_star = optimize.brentq(max_modulus, 0.0, upper, xtol=1e-15, rtol=1e-14)
    direction = ring[int(np.argmax(np.abs(_polyval(coeffs, r_star * ring))))]

    def along_ray(s: float) -> float:
        return abs(_polyval(coeffs, s * direction)) - target

    reach = max(r_star, 1e-12)
    while along_ray(reach) < 0:
        reach *= 1.0 + 1e-6
    s_star = optimize.brentq(along_ray, 0.0, reach, xtol=1e-15, rtol=1e-15)
    zeta = complex(s_star * direction)
    modulus = abs(_polyval(coeffs, zeta))
    if abs(modulus - target) > tolerance * target:
        raise VerificationFailure(f"W-line crossing off by {abs(modulus - target):.3e} at layer {layer}")
    return WLineWitness(zeta, layer, modulus, target)


@dataclass(frozen=True)
class ELineMeeting:
    """Whether ζ ↦ (w0, x0, y0, ζ) meets a shell, with an exact z value when it does."""

    meets: bool
    layer: Optional[int] = None
    z: Optional[GaussianRational] = None


def eline_meets_shell(base: Sequence[Scalar], S: ShellSet) -> ELineMeeting:
    """Exact decision for E-lines against A, B and K3 × C."""
    w0, x0, y0 = as_exact_vector(base)
    if S.kind == ShellKind.A:
        # z is free: layer i is reachable once max(|w0|, |x0|) ≤ 2^{i−1} and |y0| ≤ c_i
        i = 1
        while True:
            layer = S.layer(i)
            if (
                cmp_abs_to_dyadic(w0, i - 1) != Ordering.GREATER
                and cmp_abs_to_dyadic(x0, i - 1) != Ordering.GREATER
                and cmp_abs_to_rational(y0, layer.caps[0][1]) != Ordering.GREATER
            ):
                on_shell = Ordering.EQUAL in (cmp_abs_to_dyadic(w0, i - 1), cmp_abs_to_dyadic(x0, i - 1))
                z = GaussianRational(0) if on_shell else GaussianRational(dyadic(i - 1))
                return ELineMeeting(True, i, z)
            i += 1
    if S.kind in (ShellKind.B, ShellKind.K3):
        member = shell_membership(S, (w0, x0, y0, GaussianRational(0)))
        return ELineMeeting(member.inside, member.layer, GaussianRational(0) if member.inside else None)
    raise InvalidInput(f"E-lines are tested against A, B or K3, got {S.kind.value}")


@dataclass(frozen=True)
class LnStructure:
    n: Optional[int]
    component_count: int
    components: Tuple[str, ...]

    def contains(self, p: Point) -> bool:
        return shell_membership(ShellSet.ln(self.n), p).inside


def ln_structure(n: Optional[int]) -> LnStructure:
    """The slab union {x ∈ {1..n}} ⊂ C⁴; `None` stands for L_∞ = C⁴."""
    if n is None:
        return LnStructure(None, 1, ("C^4",))
    if n < 1:
        raise InvalidInput(f"n must be positive, got {n}")
    return LnStructure(n, n, tuple(f"x = {k}" for k in range(1, n + 1)))
