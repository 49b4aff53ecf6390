"""Derivative estimates for horizontal discs avoiding the A and B shells.

The verdicts compare |f′(0)| coordinatewise with dyadic thresholds that
depend on the ball 2^{N0}D⁴ containing f(0); every comparison is exact.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .exactnum import (
    GaussianRational,
    Ordering,
    Scalar,
    as_exact_vector,
    cmp_abs_to_dyadic,
    dyadic,
    exact_sqrt,
)
from .guards import InvalidInput, NotInDistribution
from .horizontal import DiscModel, HorizontalDisc, in_standard_d, integrate_horizontal_D
from .obstacles import AvoidanceSettings, ShellKind, ShellSet, disc_avoids
from .poly import STANDARD_AMBIENT, UniPoly, sup_on_circle

logger = logging.getLogger(__name__)

LemmaModel = Literal["A", "B"]


def cauchy_derivative_bound(M: float, rho: float) -> float:
    """Bound |g′(0)| by M/ρ when |g| ≤ M on the circle of radius ρ."""
    if rho <= 0:
        raise InvalidInput(f"radius must be positive, got {rho}")
    if M < 0:
        raise InvalidInput(f"modulus bound must be nonnegative, got {M}")
    return M / rho


def lemma_thresholds(model: LemmaModel, N0: int) -> Dict[str, int]:
    """Dyadic exponents t with |c′(0)| < 2^t for each coordinate c."""
    if model == "B":
        return {"w": N0 + 1, "x": N0 + 1, "y": 3 * N0 + 2, "z": 2 * N0 + 1}
    if model == "A":
        return {"w": N0 + 1, "x": N0 + 1, "y": 2 * N0 + 1, "z": N0 + 1}
    raise InvalidInput(f"unknown lemma model {model!r}")


class CoordinateBound(BaseModel):
    """One coordinate's derivative at 0 against its threshold."""

    coordinate: str = Field(description="Coordinate name")
    observed: float = Field(description="|c′(0)| as a float")
    observed_sq: str = Field(description="|c′(0)|² exactly")
    threshold_exponent: int = Field(description="t in the strict bound |c′(0)| < 2^t")
    threshold: str = Field(description="2^t exactly")
    passed: bool = Field(description="Whether the strict bound holds")


class LemmaVerdict(BaseModel):
    """Outcome of the derivative estimate for one disc."""

    lemma: LemmaModel = Field(description="Obstacle the disc avoids")
    N0: int = Field(description="Ball exponent with f(0) in 2^N0 D^4")
    bounds: List[CoordinateBound] = Field(description="Per-coordinate comparisons in (w, x, y, z) order")
    passed: bool = Field(description="All four strict bounds hold")


def point_in_ball(p: Sequence[Scalar], N0: int) -> bool:
    """Exact test p ∈ 2^{N0}D⁴ (open polydisc)."""
    return all(cmp_abs_to_dyadic(c, N0) == Ordering.LESS for c in as_exact_vector(p))


def minimal_ball_exponent(p: Sequence[Scalar]) -> int:
    """Smallest N0 ≥ 1 with p ∈ 2^{N0}D⁴."""
    N0 = 1
    while not point_in_ball(p, N0):
        N0 += 1
    return N0


def _verdict(model: LemmaModel, disc: HorizontalDisc, N0: int) -> LemmaVerdict:
    bounds = []
    for name, exponent in lemma_thresholds(model, N0).items():
        derivative = disc.component(name).coefficient(1)
        bounds.append(
            CoordinateBound(
                coordinate=name,
                observed=abs(complex(derivative)),
                observed_sq=str(derivative.abs2()),
                threshold_exponent=exponent,
                threshold=str(dyadic(exponent)),
                passed=cmp_abs_to_dyadic(derivative, exponent) == Ordering.LESS,
            )
        )
    return LemmaVerdict(lemma=model, N0=N0, bounds=bounds, passed=all(b.passed for b in bounds))


def _check_hypotheses(
    model: LemmaModel, disc: HorizontalDisc, N0: int, S: ShellSet, settings: Optional[AvoidanceSettings]
) -> None:
    expected = ShellKind.B if model == "B" else ShellKind.A
    if S.kind != expected:
        raise InvalidInput(f"lemma {model} is stated for shell {expected.value}, got {S.kind.value}")
    if disc.model != DiscModel.D:
        raise InvalidInput(f"hypothesis 'D_st-horizontal' fails: disc is {disc.model.value}")
    if N0 < 1:
        raise InvalidInput(f"hypothesis 'N0 ∈ N' fails: N0 = {N0}")
    if not point_in_ball(disc.basepoint, N0):
        raise InvalidInput(f"hypothesis 'f(0) ∈ 2^{N0}D⁴' fails at {[str(c) for c in disc.basepoint]}")
    avoidance = disc_avoids(S, disc, 1.0, settings)
    if not avoidance.certified:
        raise InvalidInput(f"hypothesis 'f(D) ∩ {S.kind.value} = ∅' not certified: {avoidance.status.value}")


def lemma_B_verdict(
    disc: HorizontalDisc, N0: int, S: Optional[ShellSet] = None, settings: Optional[AvoidanceSettings] = None
) -> LemmaVerdict:
    """Check |w′|,|x′| < 2^{N0+1}, |y′| < 2^{3N0+2}, |z′| < 2^{2N0+1} at 0."""
    S = S or ShellSet.b()
    _check_hypotheses("B", disc, N0, S, settings)
    return _verdict("B", disc, N0)


def lemma_A_verdict(
    disc: HorizontalDisc, N0: int, S: Optional[ShellSet] = None, settings: Optional[AvoidanceSettings] = None
) -> LemmaVerdict:
    """Check |w′|,|x′|,|z′| < 2^{N0+1}, |y′| < 2^{2N0+1} at 0."""
    S = S or ShellSet.a()
    _check_hypotheses("A", disc, N0, S, settings)
    return _verdict("A", disc, N0)


class ProofStep(BaseModel):
    """A quantity the estimate's argument bounds, with its certified value."""

    step: str = Field(description="What is being bounded")
    observed: float = Field(description="Certified upper value on the disc")
    bound: float = Field(description="Bound used by the argument")
    holds: bool = Field(description="observed < bound")


def lemma_proof_trace(disc: HorizontalDisc, model: LemmaModel = "B", N0: Optional[int] = None) -> List[ProofStep]:
    """Replay the Cauchy-estimate argument on a polynomial disc.

    Picks N with the block coordinates below 2^N on the closed disc, then
    bounds x′ and the integrands on |ζ| ≤ 1 − 2^{−N} and compares the
    integrated z and y with the caps.
    """
    N0 = minimal_ball_exponent(disc.basepoint) if N0 is None else N0
    block = ("w", "x") if model == "B" else ("w", "x", "z")
    sup_block = max(sup_on_circle(disc.component(c), 1.0).certified_upper for c in block)
    N = max(N0 + 1, math.floor(math.log2(sup_block)) + 1 if sup_block > 0 else 1)
    r = 1.0 - 2.0 ** (-N)

    w, x, y, z = (disc.component(c) for c in STANDARD_AMBIENT)
    dx = x.derivative()
    steps = [
        ProofStep(step=f"max(|{'|,|'.join(block)}|) on the closed disc", observed=sup_block, bound=2.0 ** N, holds=sup_block < 2.0 ** N),
    ]

    def bounded(label: str, poly: UniPoly, limit: float) -> None:
        value = sup_on_circle(poly, r).certified_upper
        steps.append(ProofStep(step=label, observed=value, bound=limit, holds=value < limit))

    bounded("|x′| on |ζ| ≤ 1 − 2^{−N}", dx, 2.0 ** (2 * N))
    if model == "B":
        bounded("|w x′| on |ζ| ≤ 1 − 2^{−N}", w * dx, 2.0 ** (3 * N))
        bounded("|z| on |ζ| ≤ 1 − 2^{−N}", z, 2.0 ** N0 + 2.0 ** (3 * N))
        bounded("|y| on |ζ| ≤ 1 − 2^{−N}", y, 2.0 ** N0 + 2.0 ** (5 * N + 1))
    else:
        bounded("|z x′| on |ζ| ≤ 1 − 2^{−N}", z * dx, 2.0 ** (3 * N))
        bounded("|y| on |ζ| ≤ 1 − 2^{−N}", y, 2.0 ** N0 + 2.0 ** (3 * N))
    for name, exponent in lemma_thresholds(model, N0).items():
        value = abs(complex(disc.component(name).coefficient(1)))
        steps.append(ProofStep(step=f"|{name}′(0)|", observed=value, bound=2.0 ** exponent, holds=value < 2.0 ** exponent))
    return steps


# Finsler lower bound


@dataclass(frozen=True)
class FinslerLower:
    """Lower bound for the directed Finsler metric at (p, v).

    The bound is a maximum of |v_c|/2^{t_c}; its square is rational and
    kept exactly.
    """

    point: Tuple[GaussianRational, ...]
    direction: Tuple[GaussianRational, ...]
    model: LemmaModel
    N0: int
    value_sq: Fraction
    value: float
    exact_value: Optional[Fraction]

    def to_dict(self) -> Dict[str, object]:
        return {
            "point": [str(c) for c in self.point],
            "direction": [str(c) for c in self.direction],
            "model": self.model,
            "N0": self.N0,
            "value_sq": str(self.value_sq),
            "value": self.value,
            "exact_value": str(self.exact_value) if self.exact_value is not None else None,
        }


def finsler_lower_bound(p: Sequence[Scalar], v: Sequence[Scalar], model: LemmaModel = "B") -> FinslerLower:
    """Lower bound from the derivative estimates with the smallest admissible N0."""
    point, direction = as_exact_vector(p), as_exact_vector(v)
    if len(point) != 4 or len(direction) != 4:
        raise InvalidInput("point and direction need four coordinates (w, x, y, z)")
    violated = in_standard_d(point, direction)
    if violated is not None:
        raise NotInDistribution(f"v is not in D_p: {violated} fails")
    N0 = minimal_ball_exponent(point)
    thresholds = lemma_thresholds(model, N0)
    value_sq = max(c.abs2() / dyadic(2 * thresholds[name]) for name, c in zip(STANDARD_AMBIENT, direction))
    return FinslerLower(point, direction, model, N0, value_sq, math.sqrt(value_sq), exact_sqrt(value_sq))


# samplers


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for sample `index` of a seeded suite."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def random_dyadic(rng: np.random.Generator, bound: int = 8, scale: int = 4) -> Fraction:
    """Uniform dyadic rational in [−bound/2^scale, bound/2^scale]."""
    return Fraction(int(rng.integers(-bound, bound + 1)), 2 ** scale)


def random_gaussian(rng: np.random.Generator, bound: int = 8, scale: int = 4) -> GaussianRational:
    return GaussianRational(random_dyadic(rng, bound, scale), random_dyadic(rng, bound, scale))


def _polynomial_with_l1(rng: np.random.Generator, constant: GaussianRational, degree: int, budget: Fraction) -> UniPoly:
    """Random polynomial whose nonconstant coefficients have l¹ size below `budget`."""
    coeffs = [constant]
    remaining = budget
    for _ in range(degree):
        c = random_gaussian(rng)
        size = abs(c.re) + abs(c.im)
        if size >= remaining:
            c = GaussianRational(c.re * remaining / (2 * size), c.im * remaining / (2 * size)) if size else c
            size = abs(c.re) + abs(c.im)
        coeffs.append(c)
        remaining -= size
    return UniPoly(coeffs)


def sample_subshell_disc(rng: np.random.Generator, max_degree: int = 3) -> HorizontalDisc:
    """A D_st-disc whose block coordinates stay inside the unit polydisc.

    l¹ coefficient budgets of 1/2 for w and x keep |w|, |x| < 1; for A the
    integrated z is kept below 1 as well.
    """
    degree = int(rng.integers(1, max_degree + 1))
    w = _polynomial_with_l1(rng, GaussianRational(random_dyadic(rng, 4, 4)), degree, Fraction(1, 4))
    x = _polynomial_with_l1(rng, GaussianRational(random_dyadic(rng, 4, 4)), degree, Fraction(1, 4 * degree))
    z0 = random_gaussian(rng, 4, 4)
    y0 = random_gaussian(rng, 5, 2)
    return integrate_horizontal_D(w, x, y0, z0)


def sample_line_disc(rng: np.random.Generator) -> HorizontalDisc:
    """A degree-one D_st-disc with |w|, |x| < 1 on the closed disc."""
    w = UniPoly((GaussianRational(random_dyadic(rng, 4, 4)), random_gaussian(rng, 4, 4)))
    x = UniPoly((GaussianRational(random_dyadic(rng, 4, 4)), random_gaussian(rng, 4, 4) or GaussianRational(Fraction(1, 8))))
    return integrate_horizontal_D(w, x, random_gaussian(rng, 5, 2), random_gaussian(rng, 4, 4))


def _stretched(disc: HorizontalDisc, s: Fraction) -> HorizontalDisc:
    w, x = disc.component("w"), disc.component("x")
    w_s = UniPoly([w.coefficient(0)] + [w.coefficient(k) * s for k in range(1, w.degree() + 1)])
    x_s = UniPoly([x.coefficient(0)] + [x.coefficient(k) * s for k in range(1, x.degree() + 1)])
    return integrate_horizontal_D(w_s, x_s, disc.basepoint[2], disc.basepoint[3])


def stretch_to_limit(
    disc: HorizontalDisc,
    S: ShellSet,
    settings: Optional[AvoidanceSettings] = None,
    bisections: int = 4,
    max_doublings: int = 8,
) -> Tuple[Fraction, HorizontalDisc]:
    """Scale the nonconstant parts of w and x by the largest factor found that keeps avoidance certified.

    The factor is doubled until certification fails, then bisected. f(0) is
    unchanged; `disc` itself must already be certified.
    """
    def avoids(candidate: HorizontalDisc) -> bool:
        return disc_avoids(S, candidate, 1.0, settings).certified

    lo, best = Fraction(1), disc
    hi: Optional[Fraction] = None
    for _ in range(max_doublings):
        candidate = _stretched(disc, 2 * lo)
        if not avoids(candidate):
            hi = 2 * lo
            break
        lo, best = 2 * lo, candidate
    if hi is None:
        return lo, best
    for _ in range(bisections):
        mid = (lo + hi) / 2
        candidate = _stretched(disc, mid)
        if avoids(candidate):
            lo, best = mid, candidate
        else:
            hi = mid
    return lo, best


def sample_crossing_disc(rng: np.random.Generator, model: LemmaModel = "B") -> HorizontalDisc:
    """A D_st-disc whose w crosses |w| = 1 while a cap keeps it off layer 1.

    x′ is tiny so the integrated coordinates move little; the capped
    coordinate (z for B, y for A) starts in (16 + S, 32) where S bounds its
    variation, so the first layer's cap 2^4 excludes it and f(0) ∈ 2^5 D⁴.
    """
    w0 = GaussianRational(Fraction(int(rng.integers(8, 13)), 16))
    w = UniPoly((w0, GaussianRational(Fraction(int(rng.integers(10, 14)), 16))))
    x = UniPoly((GaussianRational(random_dyadic(rng, 4, 4)), random_gaussian(rng, 1, 8)))
    capped = GaussianRational(Fraction(24) + random_dyadic(rng, 4, 2))
    if model == "B":
        return integrate_horizontal_D(w, x, random_gaussian(rng, 8, 2), capped)
    return integrate_horizontal_D(w, x, capped, random_gaussian(rng, 4, 6))


def classify_injective(disc: HorizontalDisc) -> str:
    """"injective" when a coordinate has degree 1, otherwise "unclassified"."""
    return "injective" if any(c.degree() == 1 for c in disc.curve.components) else "unclassified"


REGIMES = ("near-limit", "shell-crossing", "sub-shell", "shell-crossing")


@dataclass
class LemmaSample:
    index: int
    regime: str
    verdict: LemmaVerdict
    injectivity: str


def sample_certified_discs(
    model: LemmaModel,
    count: int,
    seed: int,
    settings: Optional[AvoidanceSettings] = None,
    max_attempts: int = 20,
) -> List[LemmaSample]:
    """Draw `count` discs certified to avoid the shell and return their verdicts.

    Odd indices use the shell-crossing sampler at N0 = 5. Even ones stay at
    N0 = 1: multiples of four take a line disc stretched to the edge of
    certified avoidance, the rest the sub-shell sampler. Rejected draws are
    redrawn from the same per-sample stream.
    """
    S = ShellSet.b() if model == "B" else ShellSet.a()
    verdict_fn: Callable[..., LemmaVerdict] = lemma_B_verdict if model == "B" else lemma_A_verdict
    draw: Dict[str, Callable[[np.random.Generator], HorizontalDisc]] = {
        "near-limit": sample_line_disc,
        "sub-shell": sample_subshell_disc,
        "shell-crossing": lambda rng: sample_crossing_disc(rng, model),
    }
    samples: List[LemmaSample] = []
    for index in range(count):
        rng = sample_rng(seed, index)
        regime = REGIMES[index % 4]
        N0 = 5 if regime == "shell-crossing" else 1
        for attempt in range(max_attempts):
            disc = draw[regime](rng)
            if not point_in_ball(disc.basepoint, N0) or not disc_avoids(S, disc, 1.0, settings).certified:
                logger.debug("sample %d attempt %d rejected", index, attempt)
                continue
            if regime == "near-limit":
                factor, disc = stretch_to_limit(disc, S, settings)
                logger.debug("sample %d stretched by %s", index, factor)
            verdict = verdict_fn(disc, N0, S, settings)
            samples.append(LemmaSample(index, regime, verdict, classify_injective(disc)))
            break
        else:
            logger.warning("sample %d: no certified disc after %d attempts", index, max_attempts)
    return samples
