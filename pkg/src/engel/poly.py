"""Polynomials over the Gaussian rationals.

`MultiPoly` lives on a fixed ordered list of coordinate names, `UniPoly` is a
polynomial in the curve parameter ζ, `PolyCurve` bundles one `UniPoly` per
target coordinate and `PolyMap` is a polynomial self-map.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import (
    Dict,
    Iterable,
    Iterator,
    List,
    Literal,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
    Union,
)

import numpy as np
import sympy

from .exactnum import ONE, ZERO, GaussianRational, Scalar, checked_complex
from .guards import AmbientMismatch, InvalidInput, UnknownCoordinate

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Point = Sequence[Union[GaussianRational, int, Fraction, complex, float]]

STANDARD_AMBIENT: Tuple[str, ...] = ("w", "x", "y", "z")

T = TypeVar("T")


def _grlex_key(exp: Exponent) -> Tuple[int, Exponent]:
    return (sum(exp), exp)


def _is_exact(value: object) -> bool:
    return isinstance(value, (GaussianRational, int, Fraction)) and not isinstance(value, bool)


def _power_table(values: Sequence[T], exps: Iterable[Exponent], one: T) -> List[Dict[int, T]]:
    """Cache the powers of each value that the exponent list needs."""
    needed: List[int] = [0] * len(values)
    for exp in exps:
        for i, e in enumerate(exp):
            if e > needed[i]:
                needed[i] = e
    table: List[Dict[int, T]] = []
    for value, top in zip(values, needed):
        powers: Dict[int, T] = {0: one}
        current = one
        for e in range(1, top + 1):
            current = current * value
            powers[e] = current
        table.append(powers)
    return table


class MultiPoly:
    """A polynomial on an ordered ambient coordinate list.

    Terms map exponent vectors to nonzero coefficients and are kept in
    descending graded-lexicographic order.
    """

    __slots__ = ("ambient", "_terms")

    def __init__(self, ambient: Sequence[str], terms: Optional[Mapping[Sequence[int], Scalar]] = None):
        ambient = tuple(ambient)
        if len(set(ambient)) != len(ambient):
            raise InvalidInput(f"duplicate coordinate in ambient {ambient}")
        collected: Dict[Exponent, GaussianRational] = {}
        for raw_exp, raw_coef in (terms or {}).items():
            exp = tuple(int(e) for e in raw_exp)
            if len(exp) != len(ambient) or any(e < 0 for e in exp):
                raise InvalidInput(f"exponent {exp} does not fit ambient {ambient}")
            coef = GaussianRational.coerce(raw_coef)
            collected[exp] = collected.get(exp, ZERO) + coef
        self.ambient = ambient
        self._terms = self._canonical(collected)

    @staticmethod
    def _canonical(terms: Mapping[Exponent, GaussianRational]) -> Dict[Exponent, GaussianRational]:
        return {e: terms[e] for e in sorted(terms, key=_grlex_key, reverse=True) if terms[e]}

    @classmethod
    def _raw(cls, ambient: Tuple[str, ...], terms: Mapping[Exponent, GaussianRational]) -> MultiPoly:
        poly = cls.__new__(cls)
        poly.ambient = ambient
        poly._terms = cls._canonical(terms)
        return poly

    # constructors

    @classmethod
    def zero(cls, ambient: Sequence[str]) -> MultiPoly:
        return cls._raw(tuple(ambient), {})

    @classmethod
    def constant(cls, ambient: Sequence[str], value: Scalar) -> MultiPoly:
        ambient = tuple(ambient)
        return cls._raw(ambient, {(0,) * len(ambient): GaussianRational.coerce(value)})

    @classmethod
    def variable(cls, ambient: Sequence[str], name: str) -> MultiPoly:
        ambient = tuple(ambient)
        if name not in ambient:
            raise UnknownCoordinate(f"{name!r} is not one of {ambient}")
        exp = tuple(1 if a == name else 0 for a in ambient)
        return cls._raw(ambient, {exp: ONE})

    @classmethod
    def monomial(cls, ambient: Sequence[str], powers: Mapping[str, int], coef: Scalar = 1) -> MultiPoly:
        ambient = tuple(ambient)
        unknown = set(powers) - set(ambient)
        if unknown:
            raise UnknownCoordinate(f"{sorted(unknown)} not in {ambient}")
        exp = tuple(int(powers.get(a, 0)) for a in ambient)
        return cls(ambient, {exp: coef})

    # inspection

    @property
    def terms(self) -> Mapping[Exponent, GaussianRational]:
        return MappingProxyType(self._terms)

    def items(self) -> Iterator[Tuple[Exponent, GaussianRational]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_term(self) -> GaussianRational:
        return self._terms.get((0,) * len(self.ambient), ZERO)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, name: str) -> int:
        idx = self._index(name)
        return max((e[idx] for e in self._terms), default=-1)

    def involves(self, name: str) -> bool:
        idx = self._index(name)
        return any(e[idx] for e in self._terms)

    def variables(self) -> Tuple[str, ...]:
        return tuple(a for i, a in enumerate(self.ambient) if any(e[i] for e in self._terms))

    def leading_coefficient(self) -> GaussianRational:
        return next(iter(self._terms.values()), ZERO)

    def _index(self, name: str) -> int:
        try:
            return self.ambient.index(name)
        except ValueError:
            raise UnknownCoordinate(f"{name!r} is not one of {self.ambient}") from None

    # ring structure

    def _coerce(self, other: object) -> Optional[MultiPoly]:
        if isinstance(other, MultiPoly):
            if other.ambient != self.ambient:
                raise AmbientMismatch(f"{self.ambient} vs {other.ambient}")
            return other
        if _is_exact(other):
            return MultiPoly.constant(self.ambient, other)  # type: ignore[arg-type]
        return None

    def __add__(self, other: object) -> MultiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in o._terms.items():
            terms[e] = terms.get(e, ZERO) + c
        return MultiPoly._raw(self.ambient, terms)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.ambient, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: object) -> MultiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> MultiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> MultiPoly:
        if _is_exact(other):
            return self.scale(other)  # type: ignore[arg-type]
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: Dict[Exponent, GaussianRational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, ZERO) + c1 * c2
        return MultiPoly._raw(self.ambient, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> MultiPoly:
        if exponent < 0:
            raise InvalidInput("negative powers of polynomials are not polynomials")
        result = MultiPoly.constant(self.ambient, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, value: Scalar) -> MultiPoly:
        c = GaussianRational.coerce(value)
        return MultiPoly._raw(self.ambient, {e: c * v for e, v in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self.ambient == other.ambient and self._terms == other._terms
        if _is_exact(other):
            return self == MultiPoly.constant(self.ambient, other)  # type: ignore[arg-type]
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ambient, tuple(self._terms.items())))

    def __bool__(self) -> bool:
        return bool(self._terms)

    # calculus and substitution

    def differentiate(self, name: str) -> MultiPoly:
        idx = self._index(name)
        terms: Dict[Exponent, GaussianRational] = {}
        for e, c in self._terms.items():
            if e[idx]:
                lowered = e[:idx] + (e[idx] - 1,) + e[idx + 1:]
                terms[lowered] = c * e[idx]
        return MultiPoly._raw(self.ambient, terms)

    def evaluate_in(self, values: Sequence[T], one: T) -> T:
        """Substitute ring elements (polynomials, curves, exact scalars) for the coordinates."""
        if len(values) != len(self.ambient):
            raise InvalidInput(f"expected {len(self.ambient)} values, got {len(values)}")
        table = _power_table(values, self._terms.keys(), one)
        total: Optional[T] = None
        for e, c in self._terms.items():
            term: T = one
            for i, k in enumerate(e):
                if k:
                    term = term * table[i][k]
            term = c * term  # type: ignore[operator]
            total = term if total is None else total + term
        if total is None:
            return one * ZERO  # type: ignore[operator]
        return total

    def evaluate(self, point: Point) -> Union[GaussianRational, complex]:
        """Exact value at an exact point, complex value otherwise."""
        if len(point) != len(self.ambient):
            raise InvalidInput(f"point has {len(point)} coordinates, ambient {self.ambient} needs {len(self.ambient)}")
        if all(_is_exact(v) for v in point):
            return self.evaluate_in([GaussianRational.coerce(v) for v in point], ONE)  # type: ignore[arg-type]
        zs = [checked_complex(v) for v in point]
        table = _power_table(zs, self._terms.keys(), 1 + 0j)
        total = 0j
        for e, c in self._terms.items():
            term = complex(c)
            for i, k in enumerate(e):
                if k:
                    term *= table[i][k]
            total += term
        return total

    def substitute(self, replacements: Union[Mapping[str, MultiPoly], Sequence[MultiPoly]]) -> MultiPoly:
        """Replace every coordinate by a polynomial on a common target ambient."""
        if isinstance(replacements, Mapping):
            missing = [a for a in self.ambient if a not in replacements]
            if missing:
                raise UnknownCoordinate(f"no replacement for {missing}")
            values = [replacements[a] for a in self.ambient]
        else:
            values = list(replacements)
        if not values:
            raise InvalidInput("nothing to substitute")
        target = values[0].ambient
        if any(v.ambient != target for v in values):
            raise AmbientMismatch("replacements live on different ambients")
        return self.evaluate_in(values, MultiPoly.constant(target, 1))

    def extend_ambient(self, ambient: Sequence[str]) -> MultiPoly:
        """View the polynomial on a larger coordinate list."""
        ambient = tuple(ambient)
        missing = [a for a in self.variables() if a not in ambient]
        if missing:
            raise AmbientMismatch(f"{missing} not in {ambient}")
        positions = [ambient.index(a) if a in ambient else -1 for a in self.ambient]
        terms: Dict[Exponent, GaussianRational] = {}
        for e, c in self._terms.items():
            new = [0] * len(ambient)
            for i, k in enumerate(e):
                if k:
                    new[positions[i]] = k
            terms[tuple(new)] = c
        return MultiPoly._raw(ambient, terms)

    # display and sympy

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(
                a if k == 1 else f"{a}^{k}" for a, k in zip(self.ambient, e) if k
            )
            coef = str(c)
            if not mono:
                parts.append(f"({coef})" if c.re and c.im else coef)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"({coef})*{mono}" if c.re and c.im else f"{coef}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MultiPoly({self.ambient}, {self})"

    def to_sympy(self, symbols: Optional[Sequence[sympy.Symbol]] = None) -> sympy.Expr:
        syms = list(symbols) if symbols is not None else list(sympy.symbols(self.ambient))
        expr = sympy.Integer(0)
        for e, c in self._terms.items():
            mono = sympy.Integer(1)
            for s, k in zip(syms, e):
                if k:
                    mono *= s ** k
            expr += _coef_to_sympy(c) * mono
        return expr

    @classmethod
    def from_sympy(cls, expr: sympy.Expr, ambient: Sequence[str]) -> MultiPoly:
        ambient = tuple(ambient)
        syms = sympy.symbols(ambient)
        if len(ambient) == 1:
            syms = (syms,) if not isinstance(syms, tuple) else syms
        poly = sympy.Poly(sympy.expand(expr), *syms)
        terms = {tuple(monom): _coef_from_sympy(coef) for monom, coef in poly.terms()}
        return cls(ambient, terms)


def _coef_to_sympy(c: GaussianRational) -> sympy.Expr:
    return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
        c.im.numerator, c.im.denominator
    )


def _coef_from_sympy(coef: sympy.Expr) -> GaussianRational:
    re_part = sympy.Rational(sympy.re(coef))
    im_part = sympy.Rational(sympy.im(coef))
    return GaussianRational(Fraction(int(re_part.p), int(re_part.q)), Fraction(int(im_part.p), int(im_part.q)))


def remove_common_factor(polys: Sequence[MultiPoly]) -> List[MultiPoly]:
    """Divide out the polynomial gcd of a list; returns the input unchanged on failure."""
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        return list(polys)
    ambient = nonzero[0].ambient
    syms = list(sympy.symbols(ambient))
    try:
        exprs = [p.to_sympy(syms) for p in nonzero]
        g = sympy.gcd_list(exprs, *syms) if len(exprs) > 1 else exprs[0]
        if sympy.Poly(g, *syms).total_degree() <= 0:
            return list(polys)
        out = []
        for p in polys:
            if p.is_zero():
                out.append(p)
                continue
            q, r = sympy.div(p.to_sympy(syms), g, *syms)
            if sympy.expand(r) != 0:
                return list(polys)
            out.append(MultiPoly.from_sympy(q, ambient))
        return out
    except (sympy.PolynomialError, sympy.polys.polyerrors.PolificationFailed, TypeError, ValueError) as exc:
        logger.debug("gcd removal skipped: %s", exc)
        return list(polys)


def poly_arith(p: MultiPoly, q: Union[MultiPoly, Scalar], op: Literal["add", "sub", "mul", "scale"]) -> MultiPoly:
    """Exact ring operation; `scale` takes a scalar as `q`."""
    if op == "scale":
        if isinstance(q, MultiPoly):
            raise InvalidInput("scale expects a scalar")
        return p.scale(q)
    if not isinstance(q, MultiPoly):
        raise InvalidInput(f"{op} expects a polynomial")
    if p.ambient != q.ambient:
        raise AmbientMismatch(f"{p.ambient} vs {q.ambient}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise InvalidInput(f"unknown operation {op!r}")


def differentiate(p: MultiPoly, var: str) -> MultiPoly:
    return p.differentiate(var)


def evaluate(p: MultiPoly, point: Point) -> Union[GaussianRational, complex]:
    return p.evaluate(point)


def determinant(matrix: Sequence[Sequence[T]]) -> T:
    """Laplace expansion along the first row; sized for the 4x4 matrices used here."""
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix):
        raise InvalidInput("determinant needs a nonempty square matrix")
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]  # type: ignore[operator]
    total: Optional[T] = None
    for j in range(n):
        entry = matrix[0][j]
        if isinstance(entry, (MultiPoly, GaussianRational)) and not entry:
            continue
        minor = [row[:j] + row[j + 1:] for row in (list(r) for r in matrix[1:])]
        term = entry * determinant(minor)  # type: ignore[operator]
        if j % 2:
            term = -term
        total = term if total is None else total + term  # type: ignore[operator]
    if total is None:
        return matrix[0][0] * determinant([list(r[1:]) for r in matrix[1:]])  # type: ignore[operator]
    return total


# univariate


class UniPoly:
    """A polynomial in the curve parameter ζ, coefficients from low to high degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [GaussianRational.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: Tuple[GaussianRational, ...] = tuple(cs)

    @classmethod
    def zeta(cls) -> UniPoly:
        return cls((0, 1))

    @classmethod
    def constant(cls, value: Scalar) -> UniPoly:
        return cls((value,))

    @classmethod
    def linear(cls, c0: Scalar, c1: Scalar) -> UniPoly:
        return cls((c0, c1))

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> GaussianRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading_coefficient(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def _coerce(self, other: object) -> Optional[UniPoly]:
        if isinstance(other, UniPoly):
            return other
        if _is_exact(other):
            return UniPoly.constant(other)  # type: ignore[arg-type]
        return None

    def __add__(self, other: object) -> UniPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly(self.coefficient(k) + o.coefficient(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> UniPoly:
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other: object) -> UniPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> UniPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> UniPoly:
        if _is_exact(other):
            c = GaussianRational.coerce(other)  # type: ignore[arg-type]
            return UniPoly(c * a for a in self.coeffs)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return UniPoly()
        out = [ZERO] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> UniPoly:
        if exponent < 0:
            raise InvalidInput("negative powers of polynomials are not polynomials")
        result = UniPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if _is_exact(other):
            return self.coeffs == UniPoly.constant(other).coeffs  # type: ignore[arg-type]
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def derivative(self) -> UniPoly:
        return UniPoly(c * k for k, c in enumerate(self.coeffs) if k)

    def antiderivative(self) -> UniPoly:
        """Primitive with zero constant term."""
        return UniPoly([ZERO] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def evaluate(self, value: Union[Scalar, complex, float]) -> Union[GaussianRational, complex]:
        """Horner evaluation, exact for exact input."""
        if _is_exact(value):
            z = GaussianRational.coerce(value)  # type: ignore[arg-type]
            acc = ZERO
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc
        zf = checked_complex(value)  # type: ignore[arg-type]
        accf = 0j
        for c in reversed(self.coeffs):
            accf = accf * zf + complex(c)
        return accf

    __call__ = evaluate

    def compose(self, inner: UniPoly) -> UniPoly:
        """Return self(inner(ζ))."""
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def divmod(self, divisor: UniPoly) -> Tuple[UniPoly, UniPoly]:
        """Long division over the Gaussian rationals."""
        if divisor.is_zero():
            raise InvalidInput("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = divisor.degree()
        lead_inv = divisor.leading_coefficient().inverse()
        quot = [ZERO] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * lead_inv
            if not c:
                continue
            quot[k - dq] = c
            for j, d in enumerate(divisor.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - c * d
        return UniPoly(quot), UniPoly(rem[:dq] if dq > 0 else [])

    def to_numpy(self) -> np.ndarray:
        """Complex coefficient array, low degree first."""
        if not self.coeffs:
            return np.zeros(1, dtype=complex)
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("ζ" if k == 1 else f"ζ^{k}")
            coef = f"({c})" if c.re and c.im else str(c)
            if not mono:
                parts.append(coef)
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{coef}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"UniPoly({self})"


def antiderivative_zeta(u: UniPoly) -> UniPoly:
    """Primitive of u in ζ with zero constant term."""
    return u.antiderivative()


@dataclass(frozen=True)
class CircleBound:
    """Sampled maximum of |u| on a circle and a rigorous upper bound."""

    numeric_max: float
    certified_upper: float
    samples: int


def derivative_coefficient_bound(coeffs: np.ndarray, r: float) -> float:
    """Bound sup |u'| on the closed disc of radius r by the coefficient sum."""
    k = np.arange(len(coeffs))
    if len(coeffs) <= 1:
        return 0.0
    return float(np.sum(k[1:] * np.abs(coeffs[1:]) * r ** (k[1:] - 1)))


def sup_on_circle(
    u: Union[UniPoly, np.ndarray, Sequence[complex]], r: float, samples: Optional[int] = None
) -> CircleBound:
    """Sample |u| on |ζ| = r and certify an upper bound.

    Every point of the circle is within π r / n of one of n equally spaced
    samples, so max + (π r / n)·sup|u'| bounds the true maximum. The bound
    is also evaluated on the nested sub-grids n/2, n/4, ... and the
    smallest one kept, which makes it non-increasing when n doubles.
    """
    coeffs = u.to_numpy() if isinstance(u, UniPoly) else np.asarray(u, dtype=complex)
    if r <= 0:
        raise InvalidInput("radius must be positive")
    degree = max(len(coeffs) - 1, 1)
    n = samples if samples is not None else max(64, 8 * degree)
    if n < 8:
        raise InvalidInput("at least 8 samples are required")
    theta = 2.0 * np.pi * np.arange(n) / n
    values = np.abs(np.polynomial.polynomial.polyval(r * np.exp(1j * theta), coeffs))
    if not np.all(np.isfinite(values)):
        raise InvalidInput("non-finite polynomial values on the circle")
    lipschitz = derivative_coefficient_bound(coeffs, r)
    numeric_max = float(values.max())
    best = math.inf
    stride, count = 1, n
    while count >= 8:
        best = min(best, float(values[::stride].max()) + math.pi * r / count * lipschitz)
        if count % 2:
            break
        stride, count = stride * 2, count // 2
    return CircleBound(numeric_max, max(best, numeric_max), n)


# curves and maps


class PolyCurve:
    """A polynomial curve ζ ↦ (u_1(ζ), ..., u_n(ζ)) named by target coordinate."""

    __slots__ = ("ambient", "components")

    def __init__(self, components: Union[Mapping[str, UniPoly], Sequence[Tuple[str, UniPoly]]]):
        pairs = list(components.items()) if isinstance(components, Mapping) else list(components)
        names = tuple(name for name, _ in pairs)
        if len(set(names)) != len(names):
            raise InvalidInput(f"duplicate curve component in {names}")
        self.ambient: Tuple[str, ...] = names
        self.components: Tuple[UniPoly, ...] = tuple(
            c if isinstance(c, UniPoly) else UniPoly(c) for _, c in pairs
        )

    @classmethod
    def constant(cls, ambient: Sequence[str], point: Sequence[Scalar]) -> PolyCurve:
        return cls([(a, UniPoly.constant(p)) for a, p in zip(ambient, point)])

    def __getitem__(self, name: str) -> UniPoly:
        try:
            return self.components[self.ambient.index(name)]
        except ValueError:
            raise UnknownCoordinate(f"curve has no {name!r} component") from None

    def items(self) -> Iterator[Tuple[str, UniPoly]]:
        return iter(zip(self.ambient, self.components))

    @property
    def degrees(self) -> Dict[str, int]:
        return {a: c.degree() for a, c in self.items()}

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=-1)

    def derivative(self) -> PolyCurve:
        return PolyCurve([(a, c.derivative()) for a, c in self.items()])

    def at(self, zeta: Union[Scalar, complex, float]) -> Tuple[Union[GaussianRational, complex], ...]:
        return tuple(c.evaluate(zeta) for c in self.components)

    def basepoint(self) -> Tuple[GaussianRational, ...]:
        return tuple(c.coefficient(0) for c in self.components)

    def velocity_at_zero(self) -> Tuple[GaussianRational, ...]:
        return tuple(c.coefficient(1) for c in self.components)

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.components)

    def reparametrize(self, a: Scalar, b: Scalar = 0) -> PolyCurve:
        """Return ζ ↦ f(aζ + b)."""
        inner = UniPoly.linear(b, a)
        return PolyCurve([(name, c.compose(inner)) for name, c in self.items()])

    def drop(self, name: str) -> PolyCurve:
        self[name]
        return PolyCurve([(a, c) for a, c in self.items() if a != name])

    def to_numpy(self) -> Dict[str, np.ndarray]:
        return {a: c.to_numpy() for a, c in self.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyCurve):
            return NotImplemented
        return self.ambient == other.ambient and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.ambient, self.components))

    def __repr__(self) -> str:
        inner = ", ".join(f"{a}={c}" for a, c in self.items())
        return f"PolyCurve({inner})"


def compose_curve(p: MultiPoly, curve: PolyCurve) -> UniPoly:
    """Exact substitution p(γ(ζ))."""
    missing = [a for a in p.ambient if a not in curve.ambient]
    if missing:
        raise AmbientMismatch(f"curve lacks coordinates {missing}")
    return p.evaluate_in([curve[a] for a in p.ambient], UniPoly.constant(1))


class PolyMap:
    """A polynomial map given by one component per target coordinate."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: Sequence[str], target: Sequence[str], components: Sequence[MultiPoly]):
        self.source = tuple(source)
        self.target = tuple(target)
        if len(components) != len(self.target):
            raise InvalidInput(f"{len(components)} components for target {self.target}")
        for comp in components:
            if comp.ambient != self.source:
                raise AmbientMismatch(f"component on {comp.ambient}, expected {self.source}")
        self.components: Tuple[MultiPoly, ...] = tuple(components)

    @classmethod
    def identity(cls, ambient: Sequence[str]) -> PolyMap:
        ambient = tuple(ambient)
        return cls(ambient, ambient, [MultiPoly.variable(ambient, a) for a in ambient])

    def __getitem__(self, name: str) -> MultiPoly:
        try:
            return self.components[self.target.index(name)]
        except ValueError:
            raise UnknownCoordinate(f"map has no {name!r} component") from None

    def __call__(self, point: Point) -> Tuple[Union[GaussianRational, complex], ...]:
        return tuple(c.evaluate(point) for c in self.components)

    def compose(self, inner: PolyMap) -> PolyMap:
        """Return self ∘ inner."""
        if inner.target != self.source:
            raise AmbientMismatch(f"cannot feed {inner.target} into {self.source}")
        return PolyMap(inner.source, self.target, [c.substitute(inner.components) for c in self.components])

    def pull(self, p: MultiPoly) -> MultiPoly:
        """Return p ∘ self for p on the target ambient."""
        if p.ambient != self.target:
            raise AmbientMismatch(f"{p.ambient} vs {self.target}")
        return p.substitute(self.components)

    def jacobian(self) -> Tuple[Tuple[MultiPoly, ...], ...]:
        return tuple(tuple(c.differentiate(s) for s in self.source) for c in self.components)

    def map_curve(self, curve: PolyCurve) -> PolyCurve:
        return PolyCurve([(t, compose_curve(c, curve)) for t, c in zip(self.target, self.components)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (self.source, self.target, self.components) == (other.source, other.target, other.components)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.components))

    def __repr__(self) -> str:
        inner = ", ".join(f"{t} ↦ {c}" for t, c in zip(self.target, self.components))
        return f"PolyMap({inner})"


def standard_variables(ambient: Sequence[str] = STANDARD_AMBIENT) -> Tuple[MultiPoly, ...]:
    """Coordinate functions of an ambient, e.g. (w, x, y, z)."""
    return tuple(MultiPoly.variable(ambient, a) for a in ambient)
