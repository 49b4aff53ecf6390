"""Seeded acceptance suites.

Each suite draws its samples from its own stream split off the master
seed, so suites can be run alone or together with identical results.
"""

from __future__ import annotations

import itertools
import logging
import math
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .config import get_config
from .distcalc import (
    DiffForm,
    EngelFlag,
    FlagFailure,
    VectorField,
    check_engel,
    exterior_derivative,
    lie_bracket,
    proportional,
    wedge,
)
from .estimates import REGIMES, finsler_lower_bound, random_gaussian, sample_certified_discs, sample_rng
from .exactnum import GaussianRational, IMAG_UNIT
from .guards import EngelError, VerificationFailure
from .horizontal import (
    DiscModel,
    contact_form,
    integrate_horizontal_D,
    integrate_prolonged,
    project_prolongation,
    remark_line,
    standard_forms,
    verify_tangency,
)
from .kobayashi import SearchConfig, extremal_disc_search
from .moduli import TripleSet, affine_bijection_exists
from .obstacles import ShellSet, shell_membership, wline_shell_intersection
from .poly import STANDARD_AMBIENT, MultiPoly, UniPoly
from .steering import hermite_steer, path_endpoint_check
from .transport import (
    cartan_prolong,
    chart_transition_agrees,
    compose,
    compose_shears,
    pullback_field,
    pullback_flag,
    pullback_form,
    random_shear,
    standard_contact_frame,
)

logger = logging.getLogger(__name__)

MAX_RECORDED = 10


class SuiteResult(BaseModel):
    """Outcome of one suite; `counterexamples` keeps the first few failing cases."""

    name: str
    passed: bool
    cases: int
    failures: int = 0
    counterexamples: List[Dict[str, Any]] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.failures = 0
        self.counterexamples: List[Dict[str, Any]] = []
        self.details: Dict[str, Any] = {}

    def check(self, ok: bool, **case: Any) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if len(self.counterexamples) < MAX_RECORDED:
                self.counterexamples.append({k: str(v) for k, v in case.items()})

    def result(self) -> SuiteResult:
        return SuiteResult(
            name=self.name,
            passed=self.failures == 0,
            cases=self.cases,
            failures=self.failures,
            counterexamples=self.counterexamples,
            details=self.details,
        )


# random exact objects


def random_poly(rng: np.random.Generator, ambient: Sequence[str] = STANDARD_AMBIENT, max_degree: int = 2, terms: int = 3) -> MultiPoly:
    total = MultiPoly.zero(ambient)
    for _ in range(terms):
        powers: Dict[str, int] = {}
        budget = int(rng.integers(0, max_degree + 1))
        for _ in range(budget):
            name = ambient[int(rng.integers(len(ambient)))]
            powers[name] = powers.get(name, 0) + 1
        total = total + MultiPoly.monomial(ambient, powers, random_gaussian(rng, 4, 1))
    return total


def random_field(rng: np.random.Generator, ambient: Sequence[str] = STANDARD_AMBIENT, max_degree: int = 2) -> VectorField:
    return VectorField(ambient, [random_poly(rng, ambient, max_degree, 2) for _ in ambient])


def random_d_vector(rng: np.random.Generator, p: Sequence[GaussianRational]) -> Tuple[GaussianRational, ...]:
    """A nonzero v ∈ D_p: v_y = z0·v_x, v_z = w0·v_x with v_w, v_x free."""
    w0, _x0, _y0, z0 = p
    while True:
        vw, vx = random_gaussian(rng), random_gaussian(rng)
        if vw or vx:
            return (vw, vx, z0 * vx, w0 * vx)


def standard_d_frame() -> List[VectorField]:
    """∂_w and ∂_x + z∂_y + w∂_z."""
    ambient = STANDARD_AMBIENT
    w, z = MultiPoly.variable(ambient, "w"), MultiPoly.variable(ambient, "z")
    return [
        VectorField.coordinate(ambient, "w"),
        VectorField.from_mapping(ambient, {"x": 1, "y": z, "z": w}),
    ]


def standard_flag() -> EngelFlag:
    flag = check_engel(standard_d_frame())
    if isinstance(flag, FlagFailure):
        raise VerificationFailure(f"standard structure failed at {flag.stage}")
    return flag


def _stream_seed(seed: int, suite_index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(suite_index,)).generate_state(1, dtype=np.uint64)[0])


# suites


def flag_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("flag")
    flag = check_engel(standard_d_frame())
    if isinstance(flag, FlagFailure):
        tally.check(False, stage=flag.stage, detail=flag.detail)
        return tally.result()
    (e_form,) = flag.e_forms
    tally.check(wedge(e_form, contact_form(STANDARD_AMBIENT)).is_zero(), e_form=e_form)
    tally.check(proportional(flag.W, VectorField.coordinate(STANDARD_AMBIENT, "w")), W=flag.W)
    tally.details = {"W": str(flag.W), "E": [str(f) for f in flag.e_forms], "D": [str(f) for f in flag.d_forms]}
    return tally.result()


def remark_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("remark")
    for i in range(samples):
        rng = sample_rng(seed, i)
        p = tuple(random_gaussian(rng) for _ in range(4))
        v = random_d_vector(rng, p)
        explicit = remark_line(p, v)
        integrated = integrate_horizontal_D(UniPoly((p[0], v[0])), UniPoly((p[1], v[1])), p[2], p[3])
        tally.check(explicit.curve == integrated.curve, p=p, v=v)
    return tally.result()


def _lemma_suite(model: str) -> Callable[[int, int], SuiteResult]:
    def run(seed: int, samples: int) -> SuiteResult:
        tally = _Tally(f"lemma-{model}")
        drawn = sample_certified_discs(model, samples, seed)  # type: ignore[arg-type]
        for sample in drawn:
            tally.check(sample.verdict.passed, index=sample.index, regime=sample.regime, verdict=sample.verdict.model_dump())
        tally.details = {
            "requested": samples,
            "certified": len(drawn),
            "regimes": {r: sum(s.regime == r for s in drawn) for r in sorted(set(REGIMES))},
            "injective": {
                "samples": sum(s.injectivity == "injective" for s in drawn),
                "failures": sum(s.injectivity == "injective" and not s.verdict.passed for s in drawn),
            },
        }
        if len(drawn) < samples:
            logger.warning("lemma %s: only %d of %d discs certified", model, len(drawn), samples)
        return tally.result()

    return run


def prolongation_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("prolongation")
    C1, C2, alpha = standard_contact_frame()
    for chart in ("0", "inf"):
        try:
            cartan_prolong(C1, C2, alpha, chart)  # type: ignore[arg-type]
            tally.check(True)
        except EngelError as exc:
            tally.check(False, chart=chart, error=exc)
    tally.check(chart_transition_agrees(C1, C2, alpha, seed=seed), check="chart transition")
    for i in range(samples):
        rng = sample_rng(seed, i)
        chart = "0" if i % 2 == 0 else "inf"
        fiber = UniPoly([random_gaussian(rng) for _ in range(int(rng.integers(1, 4)))])
        driver = UniPoly([random_gaussian(rng) for _ in range(int(rng.integers(2, 5)))])
        disc = integrate_prolonged(fiber, driver, (random_gaussian(rng), random_gaussian(rng)), chart)  # type: ignore[arg-type]
        projected = project_prolongation(disc.curve)
        tally.check(verify_tangency(projected, [contact_form()]).ok, chart=chart, curve=disc.curve)
    return tally.result()


def pullback_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("pullback")
    flag = standard_flag()
    for i in range(samples):
        rng = sample_rng(seed, i)
        phi = compose_shears([random_shear(rng) for _ in range(int(rng.integers(1, 6)))])
        try:
            pullback_flag(phi, flag)
            tally.check(True)
        except EngelError as exc:
            tally.check(False, index=i, shears=[s.to_dict() for s in phi.shears], error=exc)
        X, Y = random_field(rng), random_field(rng)
        natural = pullback_field(phi, lie_bracket(X, Y)) == lie_bracket(pullback_field(phi, X), pullback_field(phi, Y))
        tally.check(natural, index=i, X=X, Y=Y)
    return tally.result()


def steering_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("steering")
    equal_x = 0
    for i in range(samples):
        rng = sample_rng(seed, i)
        p = tuple(random_gaussian(rng) for _ in range(4))
        q = list(random_gaussian(rng) for _ in range(4))
        if i % 10 == 0:
            q[1] = p[1]
            equal_x += 1
        elif q[1] == p[1]:
            q[1] = p[1] + 1
        path = hermite_steer(p, q)
        tangent = all(verify_tangency(s.curve, standard_forms()[DiscModel.D]).ok for s in path.segments)
        tally.check(path_endpoint_check(path, p, q) and tangent, p=p, q=q)
    tally.details = {"equal_x_pairs": equal_x}
    return tally.result()


def finsler_suite(seed: int, samples: int, search: Optional[SearchConfig] = None) -> SuiteResult:
    tally = _Tally("finsler")
    search = search or SearchConfig.from_config("suite", seed=seed)
    B = ShellSet.b()
    origin = (0, 0, 0, 0)
    e_x = (0, 1, 0, 0)
    lower = finsler_lower_bound(origin, e_x, "B")
    tally.check(lower.exact_value == Fraction(1, 4), lower=lower.value_sq)
    at_origin = extremal_disc_search(origin, e_x, B, search)
    tally.check(at_origin.feasible and at_origin.upper >= 0.25, upper=at_origin.upper)
    tally.details["origin"] = {"lower": lower.value, "upper": at_origin.upper}
    homogeneity_checked = 0
    for i in range(samples):
        rng = sample_rng(seed, i)
        p = tuple(random_gaussian(rng) for _ in range(4))
        v = random_d_vector(rng, p)
        low = finsler_lower_bound(p, v, "B")
        up = extremal_disc_search(p, v, B, search)
        tally.check(low.value <= up.upper + 1e-12, p=p, v=v, lower=low.value, upper=up.upper)
        doubled = tuple(2 * c for c in v)
        tally.check(finsler_lower_bound(p, doubled, "B").value_sq == 4 * low.value_sq, p=p, v=v)
        if math.isfinite(up.upper):
            up2 = extremal_disc_search(p, doubled, B, search)
            tally.check(abs(up2.upper - 2 * up.upper) <= 0.05 * 2 * up.upper, p=p, v=v, upper=up.upper, doubled=up2.upper)
            homogeneity_checked += 1
    tally.details["homogeneity_checked"] = homogeneity_checked
    return tally.result()


def wline_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("wline")
    for i in range(samples):
        rng = sample_rng(seed, i)
        degree = int(rng.integers(1, 5))
        coeffs = [random_gaussian(rng, 16, 2) for _ in range(degree)]
        coeffs.append(random_gaussian(rng, 4, 2) or GaussianRational(Fraction(1)))
        w = UniPoly(coeffs)
        base = tuple(random_gaussian(rng, 16, 2) for _ in range(3))
        try:
            hit = wline_shell_intersection(w, base)
            residual = abs(hit.modulus - hit.target) / hit.target
            tally.check(residual <= 1e-9, w=w, base=base, residual=residual)
        except EngelError as exc:
            tally.check(False, w=w, base=base, error=exc)
    return tally.result()


RATIONAL_GRID: Tuple[Fraction, ...] = tuple(
    Fraction(v) for v in ("-3", "-2", "-3/2", "-1", "-1/2", "1/2", "1", "3/2", "2", "3")
)


def _affine_oracle(S: TripleSet, S_prime: TripleSet) -> bool:
    """An affine bijection exists iff some ordering preserves the ratio (s2 − s0)/(s1 − s0)."""
    s = S.elements
    ratio = (s[2] - s[0]) / (s[1] - s[0])
    for perm in itertools.permutations(S_prime.elements):
        if (perm[2] - perm[0]) / (perm[1] - perm[0]) == ratio:
            return True
    return False


def moduli_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("moduli")
    # h(ζ) = −iζ/R maps {0, 1, Ri} onto {0, 1, −i/R}, so R′ = −1/R is left out
    pairs = [(a, b) for a, b in itertools.permutations(RATIONAL_GRID, 2) if a * b != -1]
    rng = np.random.default_rng(seed)
    chosen = [pairs[k] for k in sorted(rng.choice(len(pairs), size=20, replace=False))]
    for R, R_prime in chosen:
        S, S_prime = TripleSet.standard(R), TripleSet.standard(R_prime)
        witness = affine_bijection_exists(S, S_prime)
        tally.check(witness is None and not _affine_oracle(S, S_prime), R=R, R_prime=R_prime, witness=witness)
    for R in RATIONAL_GRID:
        S = TripleSet.standard(R)
        witness = affine_bijection_exists(S, S)
        identity = witness is not None and witness.a == 1 and witness.b == 0 and witness.permutation == (0, 1, 2)
        tally.check(identity and _affine_oracle(S, S), R=R, witness=witness)
    tally.details = {"pairs": [[str(a), str(b)] for a, b in chosen]}
    return tally.result()


# unit Gaussian rationals from Pythagorean triples
_UNITS: Tuple[GaussianRational, ...] = tuple(
    GaussianRational(Fraction(a, c), Fraction(b, c)) * u
    for a, b, c in ((1, 0, 1), (3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25))
    for u in (GaussianRational(Fraction(1)), IMAG_UNIT, GaussianRational(Fraction(-1)), -IMAG_UNIT)
)


def random_b_point(rng: np.random.Generator, max_layer: int = 3) -> Tuple[GaussianRational, ...]:
    """An exact point of B: max(|w|, |x|) = 2^{i−1}, |y| ≤ 2^{5i+2}, |z| ≤ 2^{3i+1}."""
    i = int(rng.integers(1, max_layer + 1))
    radius = Fraction(2) ** (i - 1)
    on_circle = _UNITS[int(rng.integers(len(_UNITS)))] * radius
    # |random_gaussian(rng, 8, 4)| ≤ √2/2
    inside = random_gaussian(rng, 8, 4) * radius
    w, x = (on_circle, inside) if rng.integers(2) else (inside, on_circle)
    y = random_gaussian(rng, 8, 4) * Fraction(2) ** (5 * i + 2)
    z = random_gaussian(rng, 8, 4) * Fraction(2) ** (3 * i + 1)
    return (w, x, y, z)


def shell_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("shell")
    B, K3 = ShellSet.b(), ShellSet.k3(Fraction(1, 2))
    for i in range(samples):
        rng = sample_rng(seed, i)
        p = random_b_point(rng)
        in_b = shell_membership(B, p).inside
        in_k = shell_membership(K3, p[:3]).inside
        tally.check(in_b and in_k, p=p, in_b=in_b, in_k=in_k)
    return tally.result()


def axioms_suite(seed: int, samples: int) -> SuiteResult:
    tally = _Tally("axioms")
    ambient = STANDARD_AMBIENT
    for i in range(samples):
        rng = sample_rng(seed, i)
        X, Y, Z = (random_field(rng) for _ in range(3))
        jacobi = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
        tally.check(jacobi.is_zero(), axiom="jacobi", index=i)
        f = random_poly(rng)
        leibniz = lie_bracket(X, Y * f) == Y * X.apply(f) + lie_bracket(X, Y) * f
        tally.check(leibniz, axiom="leibniz", index=i)
        omega = DiffForm.one_form(ambient, {a: random_poly(rng) for a in ambient})
        tally.check(exterior_derivative(exterior_derivative(omega)).is_zero(), axiom="d2", index=i)
        phi, psi = random_shear(rng), random_shear(rng)
        functorial = pullback_field(compose(phi, psi), X) == pullback_field(psi, pullback_field(phi, X))
        tally.check(functorial, axiom="functoriality", index=i)
        commutes = pullback_form(phi, exterior_derivative(omega)) == exterior_derivative(pullback_form(phi, omega))
        tally.check(commutes, axiom="pullback-d", index=i)
    return tally.result()


SUITES: Dict[str, Tuple[str, Callable[..., SuiteResult]]] = {
    "axioms": ("axiom", axioms_suite),
    "finsler": ("finsler", finsler_suite),
    "flag": ("flag", flag_suite),
    "lemma-A": ("lemma", _lemma_suite("A")),
    "lemma-B": ("lemma", _lemma_suite("B")),
    "moduli": ("moduli", moduli_suite),
    "prolongation": ("prolongation", prolongation_suite),
    "pullback": ("pullback", pullback_suite),
    "remark": ("remark", remark_suite),
    "shell": ("shell", shell_suite),
    "steering": ("steering", steering_suite),
    "wline": ("wline", wline_suite),
}


def run_suite(
    name: str, seed: int, samples: Optional[int] = None, search: Optional[SearchConfig] = None
) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    count_key, fn = SUITES[name]
    count = samples if samples is not None else get_config().get_sample_count(count_key)
    stream = _stream_seed(seed, sorted(SUITES).index(name))
    logger.info("running suite %s with %d samples", name, count)
    if name == "finsler":
        return fn(stream, count, search)
    return fn(stream, count)


def run_all(
    seed: int, samples: Optional[int] = None, search: Optional[SearchConfig] = None, names: Optional[Sequence[str]] = None
) -> List[SuiteResult]:
    """Run suites in name order; the report order does not depend on execution order."""
    results = []
    for name in sorted(names or SUITES):
        try:
            results.append(run_suite(name, seed, samples, search))
        except EngelError as exc:
            logger.error("suite %s raised %s", name, exc)
            results.append(SuiteResult(name=name, passed=False, cases=0, failures=1, details={"error": str(exc)}))
        except Exception as exc:
            logger.exception("suite %s crashed", name)
            results.append(SuiteResult(
                name=name, passed=False, cases=0, failures=1, details={"error": f"{type(exc).__name__}: {exc}"}
            ))
    return results
