"""Exact Gaussian-rational scalars, checked complex floats and exact linear algebra."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Literal, Optional, Sequence, Tuple, Union

from .guards import ExactDivisionByZero, InvalidInput, NonFiniteValue

RationalLike = Union[int, Fraction]
Scalar = Union["GaussianRational", int, Fraction]


@dataclass(frozen=True, slots=True, eq=False)
class GaussianRational:
    """A complex number with rational real and imaginary parts.

    `Fraction` already keeps lowest terms with a positive denominator, so
    equal values always compare and hash equal.
    """

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: Scalar) -> GaussianRational:
        """Lift an int, Fraction or GaussianRational into the field."""
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls(Fraction(value))
        raise InvalidInput(f"cannot use {value!r} as an exact Gaussian rational")

    # ring structure

    def __add__(self, other: Scalar) -> GaussianRational:
        o = _lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> GaussianRational:
        o = _lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Scalar) -> GaussianRational:
        o = _lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Scalar) -> GaussianRational:
        o = _lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> GaussianRational:
        o = _lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Scalar) -> GaussianRational:
        o = _lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __pos__(self) -> GaussianRational:
        return self

    def __pow__(self, exponent: int) -> GaussianRational:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> GaussianRational:
        norm = self.abs2()
        if norm == 0:
            raise ExactDivisionByZero("division by the zero Gaussian rational")
        return GaussianRational(self.re / norm, -self.im / norm)

    def abs2(self) -> Fraction:
        """Return re² + im² exactly."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self) -> complex:
        # Fraction -> float rounds to nearest.
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return format_gaussian(self)

    def __repr__(self) -> str:
        return f"GaussianRational({format_gaussian(self)!r})"

    def sort_key(self) -> Tuple[Fraction, Fraction]:
        return (self.re, self.im)


ZERO = GaussianRational()
ONE = GaussianRational(Fraction(1))
IMAG_UNIT = GaussianRational(Fraction(0), Fraction(1))


def _lift(value: object) -> Optional[GaussianRational]:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return GaussianRational(Fraction(value))
    return None


def gq(re: Union[RationalLike, str] = 0, im: Union[RationalLike, str] = 0) -> GaussianRational:
    """Shorthand constructor accepting ints, Fractions or fraction strings."""
    return GaussianRational(Fraction(re), Fraction(im))


def gaussian_arith(
    a: GaussianRational, b: GaussianRational, op: Literal["add", "sub", "mul", "div"]
) -> GaussianRational:
    """Apply one field operation; division by zero raises `ExactDivisionByZero`."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InvalidInput(f"unknown operation {op!r}")


def abs2(c: Scalar) -> Fraction:
    """Squared modulus of an exact scalar."""
    return GaussianRational.coerce(c).abs2()


class Ordering(str, enum.Enum):
    """Outcome of an exact modulus comparison."""

    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"


def _order(left: Fraction, right: Fraction) -> Ordering:
    if left < right:
        return Ordering.LESS
    if left > right:
        return Ordering.GREATER
    return Ordering.EQUAL


def dyadic(k: int) -> Fraction:
    """Return 2**k as an exact Fraction, negative k included."""
    return Fraction(2) ** k


def cmp_abs_to_dyadic(c: Scalar, k: int) -> Ordering:
    """Compare |c| with 2**k through abs2(c) versus 4**k, no rounding."""
    return _order(abs2(c), dyadic(2 * k))


def cmp_abs_to_rational(c: Scalar, radius: RationalLike) -> Ordering:
    """Compare |c| with a nonnegative rational radius."""
    radius = Fraction(radius)
    if radius < 0:
        raise InvalidInput("radius must be nonnegative")
    return _order(abs2(c), radius * radius)


def exact_sqrt(value: Fraction) -> Optional[Fraction]:
    """Return the rational square root of `value` when it exists."""
    if value < 0:
        return None
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


# float side


def checked_complex(value: Union[complex, float, int, GaussianRational]) -> complex:
    """Convert to a Python complex, rejecting NaN and infinities."""
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteValue(f"non-finite complex value {z!r}")
    return z


def from_float(value: complex, max_denominator: int = 1 << 20) -> GaussianRational:
    """Rationalize a float complex value.

    Only search heuristics may call this; core geometry stays exact.
    """
    z = checked_complex(value)
    return GaussianRational(
        Fraction(z.real).limit_denominator(max_denominator),
        Fraction(z.imag).limit_denominator(max_denominator),
    )


# textual form "a/b+c/d*i"


def parse_gaussian(text: str) -> GaussianRational:
    """Parse forms like "3", "-3/2", "i", "-2*i", "1/2-3/4*i" or "1+i"."""
    s = text.replace(" ", "").replace("j", "i")
    if not s:
        raise InvalidInput("empty Gaussian rational literal")
    try:
        if not s.endswith("i"):
            return GaussianRational(Fraction(s))
        body = s[:-1]
        if body.endswith("*"):
            body = body[:-1]
        split = -1
        for idx in range(len(body) - 1, 0, -1):
            if body[idx] in "+-" and body[idx - 1] not in "eE/":
                split = idx
                break
        if split == -1:
            real_text, imag_text = "", body
        else:
            real_text, imag_text = body[:split], body[split:]
        real = Fraction(real_text) if real_text else Fraction(0)
        if imag_text in ("", "+"):
            imag = Fraction(1)
        elif imag_text == "-":
            imag = Fraction(-1)
        else:
            imag = Fraction(imag_text)
        return GaussianRational(real, imag)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"invalid Gaussian rational literal {text!r}") from exc


def format_gaussian(c: GaussianRational) -> str:
    if c.im == 0:
        return str(c.re)
    imag = f"{abs(c.im)}*i" if abs(c.im) != 1 else "i"
    if c.re == 0:
        return f"-{imag}" if c.im < 0 else imag
    sign = "-" if c.im < 0 else "+"
    return f"{c.re}{sign}{imag}"


# exact linear algebra over Q(i)


@dataclass(frozen=True)
class RankWitness:
    """Rank together with row/column indices of a nonzero maximal minor."""

    rank: int
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]


def rank_exact(matrix: Sequence[Sequence[Scalar]]) -> RankWitness:
    """Exact rank by incremental reduced row echelon form.

    Rows are taken in order; a row joins the basis when it is independent
    of the earlier ones, so `rows` lists the first independent rows and
    `cols` their pivot columns.
    """
    basis: List[Tuple[int, List[GaussianRational]]] = []
    rows: List[int] = []
    for index, raw in enumerate(matrix):
        row = [GaussianRational.coerce(v) for v in raw]
        for pivot, prow in basis:
            factor = row[pivot]
            if factor:
                row = [a - factor * b for a, b in zip(row, prow)]
        pivot = next((j for j, v in enumerate(row) if v), None)
        if pivot is None:
            continue
        inv = row[pivot].inverse()
        row = [v * inv for v in row]
        reduced: List[Tuple[int, List[GaussianRational]]] = []
        for p, prow in basis:
            factor = prow[pivot]
            if factor:
                prow = [a - factor * b for a, b in zip(prow, row)]
            reduced.append((p, prow))
        basis = reduced + [(pivot, row)]
        rows.append(index)
    return RankWitness(len(basis), tuple(rows), tuple(p for p, _ in basis))


def solve_exact(
    matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]
) -> List[GaussianRational]:
    """Solve a square nonsingular system exactly by Gauss-Jordan elimination."""
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise InvalidInput("solve_exact needs a square system")
    aug = [
        [GaussianRational.coerce(v) for v in row] + [GaussianRational.coerce(b)]
        for row, b in zip(matrix, rhs)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise ExactDivisionByZero("singular linear system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n] for row in aug]


def as_exact_vector(values: Iterable[Union[Scalar, str]]) -> Tuple[GaussianRational, ...]:
    """Coerce ints, Fractions, strings and Gaussian rationals into an exact tuple."""
    out = []
    for v in values:
        out.append(parse_gaussian(v) if isinstance(v, str) else GaussianRational.coerce(v))
    return tuple(out)
