"""Upper and lower bounds for the D_st-directed Kobayashi-Finsler metric.

Upper bounds come from explicit horizontal discs f with f(0) = p and
f′(0) = λv that are certified to avoid an obstacle; the metric is at most
1/λ. Lower bounds come from the derivative estimates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, Field, field_validator
from scipy import integrate, optimize

from .config import get_config
from .estimates import FinslerLower, LemmaModel, finsler_lower_bound
from .exactnum import GaussianRational, Scalar, as_exact_vector, from_float
from .guards import InvalidInput, NotInDistribution, VerificationFailure
from .horizontal import HorizontalDisc, in_standard_d, integrate_horizontal_D, verify_tangency
from .obstacles import AvoidanceSettings, ShellKind, ShellSet, disc_avoids, disc_avoids_coefficients
from .poly import UniPoly
from .steering import HorizontalPath, hermite_steer

logger = logging.getLogger(__name__)

INFEASIBLE = 1e12

SearchProfile = Literal["suite", "path"]


class SearchConfig(BaseModel):
    """Budget of the extremal disc search."""

    degree: int = Field(default=4, description="Degree budget for w(ζ) and x(ζ)")
    restarts: int = Field(default=16, description="Number of seeded simplex restarts")
    max_iterations: int = Field(default=400, description="Nelder-Mead iteration cap per restart")
    seed: int = Field(default=42, description="Master seed")
    shrink_tolerance: float = Field(default=1e-6, description="Simplex size and value tolerance")
    coefficient_scale: float = Field(default=0.25, description="Spread of random starting coefficients")
    max_lambda: float = Field(default=float(2**20), description="Cap on λ, bounding the search when nothing obstructs")

    @field_validator("degree", "restarts", "max_iterations", "shrink_tolerance", "coefficient_scale", "max_lambda")
    @classmethod
    def _positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("search settings must be positive")
        return value

    @classmethod
    def from_config(cls, profile: Optional[SearchProfile] = None, **overrides: object) -> SearchConfig:
        """Defaults from the search section; "suite" and "path" apply their lighter budgets."""
        config = get_config()
        settings = {**config.get_search_settings(profile), "seed": config.get_seed()}
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**settings)


@dataclass
class SearchResult:
    upper: float
    witness: Optional[HorizontalDisc]
    lam: Optional[Fraction]
    diagnostic: str
    evaluations: int = 0
    params: Optional[Tuple[float, ...]] = None

    @property
    def feasible(self) -> bool:
        return self.witness is not None


@dataclass(order=True, frozen=True)
class _Candidate:
    objective: float
    params: Tuple[float, ...] = field(compare=True)


def _dyadic_scale(v: Sequence[GaussianRational]) -> Fraction:
    """Power of two near the largest component, so v/σ has max modulus in [1, 2·√2)."""
    largest = max(abs(complex(c)) for c in v)
    return Fraction(2) ** math.floor(math.log2(largest))


class _DiscFamily:
    """Discs w = w0 + λv_wζ + Σ a_kζ^k, x = x0 + λv_xζ + Σ b_kζ^k with y, z integrated."""

    def __init__(self, p: Sequence[GaussianRational], u: Sequence[GaussianRational], degree: int):
        self.p = p
        self.u = u
        self.degree = degree
        self.p_float = [complex(c) for c in p]
        self.u_float = [complex(c) for c in u]

    @property
    def dimension(self) -> int:
        return 1 + 4 * (self.degree - 1)

    def split(self, params: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        lam = math.exp(params[0])
        rest = params[1:].reshape(2, self.degree - 1, 2) if self.degree > 1 else np.zeros((2, 0, 2))
        a = rest[0, :, 0] + 1j * rest[0, :, 1]
        b = rest[1, :, 0] + 1j * rest[1, :, 1]
        return lam, a, b

    def float_coefficients(self, params: np.ndarray) -> Dict[str, np.ndarray]:
        lam, a, b = self.split(params)
        w0, x0, y0, z0 = self.p_float
        w = np.concatenate(([w0, lam * self.u_float[0]], a))
        x = np.concatenate(([x0, lam * self.u_float[1]], b))
        dx = P.polyder(x)
        z = P.polyint(P.polymul(w, dx))
        z[0] += z0
        y = P.polyint(P.polymul(z, dx))
        y[0] += y0
        return {"w": w, "x": x, "y": y, "z": z}

    def exact_disc(self, params: Sequence[float]) -> Tuple[Fraction, HorizontalDisc]:
        """Rationalize the parameters and integrate exactly."""
        lam = Fraction(math.exp(params[0])).limit_denominator(1 << 20)
        _, a, b = self.split(np.asarray(params))
        w0, x0, y0, z0 = self.p
        w = UniPoly([w0, self.u[0] * lam] + [from_float(c) for c in a])
        x = UniPoly([x0, self.u[1] * lam] + [from_float(c) for c in b])
        return lam, integrate_horizontal_D(w, x, y0, z0)


def extremal_disc_search(
    p: Sequence[Scalar],
    v: Sequence[Scalar],
    S: Optional[ShellSet],
    cfg: Optional[SearchConfig] = None,
    settings: Optional[AvoidanceSettings] = None,
    warm_start: Optional[Sequence[float]] = None,
) -> SearchResult:
    """Maximize λ over certified-avoiding horizontal polynomial discs through p with f′(0) = λv.

    λ is real positive. The direction is first divided by a power of two so
    that dyadic rescalings of v give the same search up to that factor.
    `warm_start` replaces the first restart's random start, e.g. with the
    parameters of a neighbouring search.
    """
    cfg = cfg or SearchConfig.from_config()
    settings = settings or AvoidanceSettings.from_config()
    point, direction = as_exact_vector(p), as_exact_vector(v)
    if len(point) != 4 or len(direction) != 4:
        raise InvalidInput("point and direction need four coordinates (w, x, y, z)")
    if not any(direction):
        raise InvalidInput("the direction must be nonzero")
    violated = in_standard_d(point, direction)
    if violated is not None:
        raise NotInDistribution(f"v is not in D_p: {violated} fails")

    sigma = _dyadic_scale(direction)
    unit = tuple(c / sigma for c in direction)
    family = _DiscFamily(point, unit, max(cfg.degree, 1))
    log_cap = math.log(cfg.max_lambda)
    seen: List[_Candidate] = []
    evaluations = 0

    def feasible(params: np.ndarray) -> bool:
        if params[0] > log_cap:
            return False
        if S is None:
            return True
        coeffs = family.float_coefficients(params)
        if not all(np.all(np.isfinite(c)) for c in coeffs.values()):
            return False
        return disc_avoids_coefficients(S, coeffs, 1.0, settings).certified

    def objective(params: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        if not feasible(params):
            return INFEASIBLE
        value = math.exp(-params[0])
        seen.append(_Candidate(value, tuple(float(t) for t in params)))
        return value

    for restart in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(restart,)))
        if restart == 0 and warm_start is not None and len(warm_start) == family.dimension:
            start = np.array(warm_start, dtype=float)
        else:
            start = np.concatenate(([0.0], rng.normal(scale=cfg.coefficient_scale, size=family.dimension - 1)))
        for _ in range(64):
            if feasible(start):
                break
            start[0] -= math.log(2.0)
        else:
            logger.debug("restart %d found no feasible starting disc", restart)
            continue
        optimize.minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.max_iterations,
                "xatol": cfg.shrink_tolerance,
                "fatol": cfg.shrink_tolerance,
            },
        )

    # best objective first, lexicographic on parameters among ties
    for candidate in sorted(set(seen))[:64]:
        lam_u, disc = family.exact_disc(candidate.params)
        if lam_u <= 0:
            continue
        if S is not None and not disc_avoids(S, disc, 1.0, settings).certified:
            continue
        lam = lam_u / sigma
        return SearchResult(float(1 / lam), disc, lam, "certified witness", evaluations, candidate.params)

    logger.warning("no certified disc through %s within the search budget", [str(c) for c in point])
    return SearchResult(math.inf, None, None, "no feasible disc within budget", evaluations)


class FinslerBound(BaseModel):
    """Lower and upper bounds for F(v_p)."""

    model_config = {"arbitrary_types_allowed": True}

    point: List[str] = Field(description="Base point p")
    direction: List[str] = Field(description="Direction v")
    lower: float = Field(description="Lower bound from the derivative estimates")
    lower_sq: str = Field(description="Square of the lower bound, exact")
    lower_exact: Optional[str] = Field(default=None, description="Lower bound when rational")
    upper: float = Field(description="1/λ of the best certified disc, inf if none was found")
    witness: Optional[Dict[str, str]] = Field(default=None, description="Witness disc components")
    search: SearchConfig = Field(description="Search budget used")


def _lemma_model(S: ShellSet) -> LemmaModel:
    if S.kind == ShellKind.A:
        return "A"
    if S.kind == ShellKind.B:
        return "B"
    raise InvalidInput(f"lower bounds are available for A and B, got {S.kind.value}")


def finsler_report(
    p: Sequence[Scalar], v: Sequence[Scalar], S: ShellSet, cfg: Optional[SearchConfig] = None
) -> FinslerBound:
    cfg = cfg or SearchConfig.from_config()
    direction = as_exact_vector(v)
    if not any(direction):
        raise InvalidInput("the zero direction has no extremal disc")
    lower: FinslerLower = finsler_lower_bound(p, v, _lemma_model(S))
    result = extremal_disc_search(p, v, S, cfg)
    if lower.value > result.upper + 1e-12:
        raise VerificationFailure(f"lower bound {lower.value} exceeds upper bound {result.upper}")
    witness = None
    if result.witness is not None:
        witness = {name: str(comp) for name, comp in result.witness.curve.items()}
    return FinslerBound(
        point=[str(c) for c in lower.point],
        direction=[str(c) for c in lower.direction],
        lower=lower.value,
        lower_sq=str(lower.value_sq),
        lower_exact=str(lower.exact_value) if lower.exact_value is not None else None,
        upper=result.upper,
        witness=witness,
        search=cfg,
    )


def path_finsler_length(
    path: HorizontalPath,
    estimator: Literal["lower", "upper"],
    S: ShellSet,
    nodes: Optional[int] = None,
    cfg: Optional[SearchConfig] = None,
) -> float:
    """Composite Simpson integral of a pointwise metric estimate along the path.

    The upper estimate runs one extremal search per node with the "path"
    budget unless `cfg` is given, each started from the previous node's witness.
    """
    n = nodes or get_config().get_quadrature_nodes()
    if n <= 0 or n % 2:
        raise InvalidInput(f"Simpson quadrature needs a positive even node count, got {n}")
    if estimator == "upper":
        cfg = cfg or SearchConfig.from_config("path")
    model = _lemma_model(S) if estimator == "lower" else None
    total = 0.0
    for segment in path.segments:
        report = verify_tangency(segment.curve, list(HorizontalDisc(segment.curve, path.model).forms))
        if not report.ok:
            raise InvalidInput("path segment is not tangent")
        velocity = segment.curve.derivative()
        ts = [segment.start + (segment.end - segment.start) * Fraction(k, n) for k in range(n + 1)]
        values = []
        previous: Optional[Tuple[float, ...]] = None
        for t in ts:
            point = segment.curve.at(t)
            vel = velocity.at(t)
            if not any(vel):
                values.append(0.0)
            elif model is not None:
                values.append(finsler_lower_bound(point, vel, model).value)  # type: ignore[arg-type]
            else:
                found = extremal_disc_search(point, vel, S, cfg, warm_start=previous)  # type: ignore[arg-type]
                previous = found.params or previous
                values.append(found.upper)
        total += float(integrate.simpson(values, x=[float(t) for t in ts]))
    return total


def directed_distance_upper(
    p: Sequence[Scalar],
    q: Sequence[Scalar],
    S: ShellSet,
    cfg: Optional[SearchConfig] = None,
    nodes: Optional[int] = None,
) -> float:
    """Upper estimate of the directed distance along the planner's path from p to q."""
    return path_finsler_length(hermite_steer(p, q), "upper", S, nodes, cfg)
