"""Vector fields, differential forms and the Engel flag W ⊂ D ⊂ E.

Fields and forms have polynomial coefficients on a named ambient. Rank
questions are answered over the field of rational functions: a random exact
point gives a nonzero minor, and bordered minors of that minor are checked
symbolically to show no larger minor survives.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import get_config
from .exactnum import GaussianRational, RankWitness, Scalar, rank_exact
from .guards import (
    AmbientMismatch,
    DegreeOverflow,
    InvalidInput,
    RankDegeneration,
    UnknownCoordinate,
    VerificationFailure,
)
from .poly import MultiPoly, PolyCurve, UniPoly, compose_curve, determinant, remove_common_factor

logger = logging.getLogger(__name__)

Coefficient = Union[MultiPoly, GaussianRational, int]
PolyMatrix = Sequence[Sequence[MultiPoly]]


def _as_poly(ambient: Tuple[str, ...], value: Coefficient) -> MultiPoly:
    if isinstance(value, MultiPoly):
        if value.ambient != ambient:
            raise AmbientMismatch(f"{value.ambient} vs {ambient}")
        return value
    return MultiPoly.constant(ambient, value)


class VectorField:
    """A polynomial vector field Σ X_i ∂_i."""

    __slots__ = ("ambient", "components")

    def __init__(self, ambient: Sequence[str], components: Sequence[Coefficient]):
        self.ambient = tuple(ambient)
        if len(components) != len(self.ambient):
            raise InvalidInput(f"{len(components)} components for ambient {self.ambient}")
        self.components: Tuple[MultiPoly, ...] = tuple(_as_poly(self.ambient, c) for c in components)

    @classmethod
    def from_mapping(cls, ambient: Sequence[str], mapping: Mapping[str, Coefficient]) -> VectorField:
        ambient = tuple(ambient)
        unknown = set(mapping) - set(ambient)
        if unknown:
            raise UnknownCoordinate(f"{sorted(unknown)} not in {ambient}")
        return cls(ambient, [mapping.get(a, 0) for a in ambient])

    @classmethod
    def coordinate(cls, ambient: Sequence[str], name: str) -> VectorField:
        """The coordinate field ∂_name."""
        return cls.from_mapping(ambient, {name: 1})

    @classmethod
    def zero(cls, ambient: Sequence[str]) -> VectorField:
        return cls(ambient, [0] * len(tuple(ambient)))

    def __getitem__(self, name: str) -> MultiPoly:
        try:
            return self.components[self.ambient.index(name)]
        except ValueError:
            raise UnknownCoordinate(f"{name!r} is not one of {self.ambient}") from None

    def apply(self, f: MultiPoly) -> MultiPoly:
        """Directional derivative X(f)."""
        if f.ambient != self.ambient:
            raise AmbientMismatch(f"{f.ambient} vs {self.ambient}")
        total = MultiPoly.zero(self.ambient)
        for name, comp in zip(self.ambient, self.components):
            if comp:
                total = total + comp * f.differentiate(name)
        return total

    def _check(self, other: VectorField) -> None:
        if not isinstance(other, VectorField):
            raise InvalidInput(f"expected a vector field, got {type(other).__name__}")
        if other.ambient != self.ambient:
            raise AmbientMismatch(f"{self.ambient} vs {other.ambient}")

    def __add__(self, other: VectorField) -> VectorField:
        self._check(other)
        return VectorField(self.ambient, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: VectorField) -> VectorField:
        self._check(other)
        return VectorField(self.ambient, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> VectorField:
        return VectorField(self.ambient, [-a for a in self.components])

    def __mul__(self, factor: Coefficient) -> VectorField:
        f = _as_poly(self.ambient, factor)
        return VectorField(self.ambient, [f * a for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.ambient == other.ambient and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.ambient, self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def evaluate(self, point: Sequence[Scalar]) -> Tuple[GaussianRational, ...]:
        return tuple(c.evaluate(point) for c in self.components)  # type: ignore[misc]

    def extend_ambient(self, ambient: Sequence[str]) -> VectorField:
        ambient = tuple(ambient)
        mapping = {a: c.extend_ambient(ambient) for a, c in zip(self.ambient, self.components)}
        return VectorField.from_mapping(ambient, mapping)

    def __str__(self) -> str:
        parts = []
        for name, comp in zip(self.ambient, self.components):
            if comp.is_zero():
                continue
            if comp == 1:
                parts.append(f"∂_{name}")
            elif len(comp.terms) == 1:
                parts.append(f"{comp}*∂_{name}")
            else:
                parts.append(f"({comp})*∂_{name}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"VectorField({self})"


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y] with components X(Y_j) − Y(X_j)."""
    X._check(Y)
    return VectorField(X.ambient, [X.apply(b) - Y.apply(a) for a, b in zip(X.components, Y.components)])


# forms

Index = Tuple[int, ...]


def _merge_sign(first: Index, second: Index) -> int:
    """Sign of the permutation sorting first + second; 0 on a repeated index."""
    if set(first) & set(second):
        return 0
    inversions = sum(1 for a in first for b in second if a > b)
    return -1 if inversions % 2 else 1


class DiffForm:
    """A k-form Σ f_I dx_I with strictly increasing 0-based indices I."""

    __slots__ = ("ambient", "degree", "_coefficients")

    def __init__(self, ambient: Sequence[str], degree: int, coefficients: Optional[Mapping[Sequence[int], Coefficient]] = None):
        self.ambient = tuple(ambient)
        n = len(self.ambient)
        if degree < 0 or degree > n:
            raise DegreeOverflow(f"degree {degree} on a {n}-dimensional ambient")
        self.degree = degree
        collected: Dict[Index, MultiPoly] = {}
        for raw_index, raw_coef in (coefficients or {}).items():
            index = tuple(int(i) for i in raw_index)
            if len(index) != degree or any(b <= a for a, b in zip(index, index[1:])) or any(
                i < 0 or i >= n for i in index
            ):
                raise InvalidInput(f"index {index} is not strictly increasing of length {degree}")
            coef = _as_poly(self.ambient, raw_coef)
            collected[index] = collected.get(index, MultiPoly.zero(self.ambient)) + coef
        self._coefficients = {i: collected[i] for i in sorted(collected) if not collected[i].is_zero()}

    @classmethod
    def _raw(cls, ambient: Tuple[str, ...], degree: int, coefficients: Dict[Index, MultiPoly]) -> DiffForm:
        form = cls.__new__(cls)
        form.ambient = ambient
        form.degree = degree
        form._coefficients = {i: coefficients[i] for i in sorted(coefficients) if not coefficients[i].is_zero()}
        return form

    @classmethod
    def zero(cls, ambient: Sequence[str], degree: int) -> DiffForm:
        return cls(ambient, degree)

    @classmethod
    def function(cls, f: MultiPoly) -> DiffForm:
        return cls._raw(f.ambient, 0, {(): f})

    @classmethod
    def dx(cls, ambient: Sequence[str], *names: str) -> DiffForm:
        """dx_{a}∧dx_{b}∧... for the given coordinate names, in the order given."""
        ambient = tuple(ambient)
        form = cls(ambient, 0, {(): 1})
        for name in names:
            if name not in ambient:
                raise UnknownCoordinate(f"{name!r} is not one of {ambient}")
            form = wedge(form, cls(ambient, 1, {(ambient.index(name),): 1}))
        return form

    @classmethod
    def one_form(cls, ambient: Sequence[str], mapping: Mapping[str, Coefficient]) -> DiffForm:
        ambient = tuple(ambient)
        unknown = set(mapping) - set(ambient)
        if unknown:
            raise UnknownCoordinate(f"{sorted(unknown)} not in {ambient}")
        return cls(ambient, 1, {(ambient.index(a),): c for a, c in mapping.items()})

    @property
    def coefficients(self) -> Mapping[Index, MultiPoly]:
        return dict(self._coefficients)

    def items(self) -> Iterator[Tuple[Index, MultiPoly]]:
        return iter(self._coefficients.items())

    def coefficient(self, index: Sequence[int]) -> MultiPoly:
        return self._coefficients.get(tuple(index), MultiPoly.zero(self.ambient))

    def is_zero(self) -> bool:
        return not self._coefficients

    def _check(self, other: DiffForm) -> None:
        if other.ambient != self.ambient:
            raise AmbientMismatch(f"{self.ambient} vs {other.ambient}")

    def __add__(self, other: DiffForm) -> DiffForm:
        self._check(other)
        if other.degree != self.degree:
            raise InvalidInput(f"cannot add forms of degree {self.degree} and {other.degree}")
        coefs = dict(self._coefficients)
        for i, c in other._coefficients.items():
            coefs[i] = coefs[i] + c if i in coefs else c
        return DiffForm._raw(self.ambient, self.degree, coefs)

    def __neg__(self) -> DiffForm:
        return DiffForm._raw(self.ambient, self.degree, {i: -c for i, c in self._coefficients.items()})

    def __sub__(self, other: DiffForm) -> DiffForm:
        return self + (-other)

    def __mul__(self, factor: Coefficient) -> DiffForm:
        f = _as_poly(self.ambient, factor)
        return DiffForm._raw(self.ambient, self.degree, {i: f * c for i, c in self._coefficients.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffForm):
            return NotImplemented
        return (self.ambient, self.degree, self._coefficients) == (other.ambient, other.degree, other._coefficients)

    def __hash__(self) -> int:
        return hash((self.ambient, self.degree, tuple(self._coefficients.items())))

    def as_vector(self) -> Tuple[MultiPoly, ...]:
        """Coefficients of a 1-form in ambient order."""
        if self.degree != 1:
            raise InvalidInput("only 1-forms have a coefficient vector")
        return tuple(self.coefficient((j,)) for j in range(len(self.ambient)))

    def pair(self, X: VectorField) -> MultiPoly:
        """ω(X) for a 1-form."""
        if self.degree != 1:
            raise InvalidInput("pairing needs a 1-form")
        return interior_product(X, self).coefficient(())

    def pull_along(self, curve: PolyCurve) -> UniPoly:
        """f*ω for a 1-form: Σ ω_i(f(ζ)) f_i′(ζ)."""
        if self.degree != 1:
            raise InvalidInput("curves pull back 1-forms only")
        velocity = curve.derivative()
        total = UniPoly()
        for (i,), c in self._coefficients.items():
            name = self.ambient[i]
            total = total + compose_curve(c, curve) * velocity[name]
        return total

    def __str__(self) -> str:
        if not self._coefficients:
            return "0"
        parts = []
        for index, coef in self._coefficients.items():
            basis = "∧".join(f"d{self.ambient[i]}" for i in index)
            if not basis:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(basis)
            elif coef == -1:
                parts.append(f"-{basis}")
            elif len(coef.terms) == 1:
                parts.append(f"{coef}*{basis}")
            else:
                parts.append(f"({coef})*{basis}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"DiffForm[{self.degree}]({self})"


def exterior_derivative(omega: DiffForm) -> DiffForm:
    n = len(omega.ambient)
    if omega.degree >= n:
        raise DegreeOverflow(f"d of a {omega.degree}-form on a {n}-dimensional ambient")
    coefs: Dict[Index, MultiPoly] = {}
    for index, c in omega.items():
        for j, name in enumerate(omega.ambient):
            sign = _merge_sign((j,), index)
            if not sign:
                continue
            partial = c.differentiate(name)
            if partial.is_zero():
                continue
            target = tuple(sorted(index + (j,)))
            term = partial if sign > 0 else -partial
            coefs[target] = coefs[target] + term if target in coefs else term
    return DiffForm._raw(omega.ambient, omega.degree + 1, coefs)


def interior_product(X: VectorField, omega: DiffForm) -> DiffForm:
    """ι_X ω, contracting the first slot."""
    if X.ambient != omega.ambient:
        raise AmbientMismatch(f"{X.ambient} vs {omega.ambient}")
    if omega.degree == 0:
        raise InvalidInput("interior product of a 0-form")
    coefs: Dict[Index, MultiPoly] = {}
    for index, c in omega.items():
        for m, i in enumerate(index):
            comp = X.components[i]
            if comp.is_zero():
                continue
            term = comp * c
            if m % 2:
                term = -term
            rest = index[:m] + index[m + 1:]
            coefs[rest] = coefs[rest] + term if rest in coefs else term
    return DiffForm._raw(omega.ambient, omega.degree - 1, coefs)


def wedge(omega: DiffForm, eta: DiffForm) -> DiffForm:
    omega._check(eta)
    n = len(omega.ambient)
    if omega.degree + eta.degree > n:
        raise DegreeOverflow(f"{omega.degree}-form ∧ {eta.degree}-form on a {n}-dimensional ambient")
    coefs: Dict[Index, MultiPoly] = {}
    for i1, c1 in omega.items():
        for i2, c2 in eta.items():
            sign = _merge_sign(i1, i2)
            if not sign:
                continue
            target = tuple(sorted(i1 + i2))
            term = c1 * c2 if sign > 0 else -(c1 * c2)
            coefs[target] = coefs[target] + term if target in coefs else term
    return DiffForm._raw(omega.ambient, omega.degree + eta.degree, coefs)


# rank over the rational function field


def _sample_point(rng: np.random.Generator, n: int) -> Tuple[GaussianRational, ...]:
    point = []
    for _ in range(n):
        nums = rng.integers(-9, 10, size=2)
        dens = rng.integers(1, 10, size=2)
        point.append(GaussianRational(Fraction(int(nums[0]), int(dens[0])), Fraction(int(nums[1]), int(dens[1]))))
    return tuple(point)


def _minor(matrix: PolyMatrix, rows: Sequence[int], cols: Sequence[int]) -> MultiPoly:
    return determinant([[matrix[r][c] for c in cols] for r in rows])


def _find_bordered_nonzero(
    matrix: PolyMatrix, rows: Sequence[int], cols: Sequence[int]
) -> Optional[Tuple[int, int]]:
    """Return (row, col) of a symbolically nonzero bordered minor, if any."""
    for r in range(len(matrix)):
        if r in rows:
            continue
        for c in range(len(matrix[0])):
            if c in cols:
                continue
            bordered_rows = sorted(list(rows) + [r])
            bordered_cols = sorted(list(cols) + [c])
            if not _minor(matrix, bordered_rows, bordered_cols).is_zero():
                return r, c
    return None


def generic_rank_matrix(
    matrix: PolyMatrix, seed: Optional[int] = None, retries: Optional[int] = None
) -> RankWitness:
    """Generic rank of a polynomial matrix with a symbolically nonzero maximal minor.

    The returned rows/cols index a minor that is nonzero as a polynomial and
    all of whose bordered minors vanish identically.
    """
    if not matrix or not matrix[0]:
        raise InvalidInput("generic rank of an empty matrix")
    ambient = matrix[0][0].ambient
    config = get_config()
    rng = np.random.default_rng(config.get_seed() if seed is None else seed)
    attempts = config.get_rank_retries() if retries is None else retries

    witness = RankWitness(0, (), ())
    for attempt in range(attempts):
        point = _sample_point(rng, len(ambient))
        values = [[entry.evaluate(point) for entry in row] for row in matrix]
        witness = rank_exact(values)  # type: ignore[arg-type]
        rows, cols = sorted(witness.rows), sorted(witness.cols)
        if _find_bordered_nonzero(matrix, rows, cols) is None:
            return RankWitness(witness.rank, tuple(rows), tuple(cols))
        logger.debug("rank sample %d hit a degenerate point, resampling", attempt)

    logger.warning("generic rank: %d sampled points were degenerate, extending minors symbolically", attempts)
    rows, cols = sorted(witness.rows), sorted(witness.cols)
    while True:
        found = _find_bordered_nonzero(matrix, rows, cols)
        if found is None:
            return RankWitness(len(rows), tuple(rows), tuple(cols))
        rows = sorted(rows + [found[0]])
        cols = sorted(cols + [found[1]])


def _field_matrix(fields: Sequence[VectorField]) -> List[List[MultiPoly]]:
    if not fields:
        raise InvalidInput("need at least one vector field")
    ambient = fields[0].ambient
    for f in fields:
        if f.ambient != ambient:
            raise AmbientMismatch(f"{f.ambient} vs {ambient}")
    return [list(f.components) for f in fields]


def generic_rank_witness(fields: Sequence[VectorField], seed: Optional[int] = None) -> RankWitness:
    return generic_rank_matrix(_field_matrix(fields), seed=seed)


def generic_rank(fields: Sequence[VectorField], seed: Optional[int] = None) -> int:
    """Rank of the fields over the rational function field."""
    return generic_rank_witness(fields, seed=seed).rank


def span_contains(vector: VectorField, frame: Sequence[VectorField], seed: Optional[int] = None) -> bool:
    """Exact membership of `vector` in the span of `frame` over rational functions.

    With a nonzero r×r minor Δ of the frame, the vector lies in the span iff
    every (r+1)×(r+1) minor bordering Δ with the vector's row vanishes
    (Cramer: Δ·Y − Σ Δ_i F_i ≡ 0).
    """
    matrix = _field_matrix(list(frame) + [vector])
    witness = generic_rank_matrix(matrix[:-1], seed=seed)
    last = len(matrix) - 1
    for c in range(len(vector.ambient)):
        if c in witness.cols:
            continue
        rows = sorted(list(witness.rows) + [last])
        cols = sorted(list(witness.cols) + [c])
        if not _minor(matrix, rows, cols).is_zero():
            return False
    return True


def proportional(X: VectorField, Y: VectorField) -> bool:
    """True iff X and Y span the same line (all 2×2 minors vanish)."""
    X._check(Y)
    for i, j in itertools.combinations(range(len(X.ambient)), 2):
        if not (X.components[i] * Y.components[j] - X.components[j] * Y.components[i]).is_zero():
            return False
    return True


def _cramer_kernel(matrix: PolyMatrix, witness: RankWitness) -> List[Tuple[MultiPoly, ...]]:
    """Polynomial basis of the right kernel of `matrix` from a rank witness.

    For a free column f the vector with entry Δ at f and −Δ(c_i ← f) at each
    pivot column c_i solves the system by Cramer's rule.
    """
    rows, cols = list(witness.rows), list(witness.cols)
    n = len(matrix[0])
    ambient = matrix[0][0].ambient
    delta = _minor(matrix, rows, cols)
    kernel = []
    for free in range(n):
        if free in cols:
            continue
        vec = [MultiPoly.zero(ambient)] * n
        vec[free] = delta
        for k, c in enumerate(cols):
            replaced = [[matrix[r][free] if j == k else matrix[r][cc] for j, cc in enumerate(cols)] for r in rows]
            vec[c] = -determinant(replaced)
        kernel.append(tuple(vec))
    return kernel


def _normalize(components: Sequence[MultiPoly]) -> Tuple[MultiPoly, ...]:
    """Remove the polynomial gcd and make the leading coefficient of the first nonzero entry 1."""
    reduced = remove_common_factor(list(components))
    lead = next((c.leading_coefficient() for c in reduced if not c.is_zero()), None)
    if lead is None:
        return tuple(reduced)
    inv = lead.inverse()
    return tuple(c.scale(inv) for c in reduced)


class DistributionFrame:
    """A frame of polynomial fields spanning a distribution of known generic rank."""

    __slots__ = ("fields", "claimed_rank", "witness")

    def __init__(self, fields: Sequence[VectorField], claimed_rank: int, seed: Optional[int] = None):
        fields = list(fields)
        if claimed_rank > len(fields):
            raise InvalidInput(f"claimed rank {claimed_rank} exceeds {len(fields)} fields")
        witness = generic_rank_witness(fields, seed=seed)
        if witness.rank != claimed_rank:
            raise RankDegeneration(f"frame has generic rank {witness.rank}, claimed {claimed_rank}")
        self.fields: Tuple[VectorField, ...] = tuple(fields)
        self.claimed_rank = claimed_rank
        self.witness = witness

    @property
    def ambient(self) -> Tuple[str, ...]:
        return self.fields[0].ambient

    def basis(self) -> Tuple[VectorField, ...]:
        """The fields indexing the witness minor."""
        return tuple(self.fields[i] for i in self.witness.rows)

    def contains(self, vector: VectorField) -> bool:
        return span_contains(vector, self.basis())

    def __len__(self) -> int:
        return len(self.fields)

    def __iter__(self) -> Iterator[VectorField]:
        return iter(self.fields)

    def __repr__(self) -> str:
        inner = ", ".join(str(f) for f in self.fields)
        return f"DistributionFrame(rank={self.claimed_rank}; {inner})"


def annihilator_forms(frame: DistributionFrame) -> Tuple[DiffForm, ...]:
    """Polynomial 1-forms cutting out the frame's span, one per missing dimension."""
    matrix = [list(f.components) for f in frame.basis()]
    witness = RankWitness(frame.claimed_rank, tuple(range(frame.claimed_rank)), frame.witness.cols)
    forms = []
    for vec in _cramer_kernel(matrix, witness):
        coefs = _normalize(vec)
        forms.append(DiffForm(frame.ambient, 1, {(j,): c for j, c in enumerate(coefs) if not c.is_zero()}))
    return tuple(forms)


def check_even_contact(E: DistributionFrame) -> bool:
    """True iff E has rank 3 and E + [E, E] is everything."""
    if E.claimed_rank != 3 or len(E.ambient) != 4:
        raise InvalidInput("even contact checks need a rank-3 frame on a 4-dimensional ambient")
    basis = E.basis()
    if generic_rank(basis) != 3:
        return False
    brackets = [lie_bracket(a, b) for a, b in itertools.combinations(basis, 2)]
    return generic_rank(list(basis) + brackets) == 4


def characteristic_line_field(E: DistributionFrame) -> VectorField:
    """The line field W ⊂ E with [W, E] ⊂ E.

    Solved from α(W) = 0 and ι_W dα ∧ α = 0 for a defining form α of E;
    the bracket condition is verified afterwards.
    """
    if not check_even_contact(E):
        raise InvalidInput("characteristic line field needs an even contact structure")
    ambient = E.ambient
    n = len(ambient)
    (alpha,) = annihilator_forms(E)
    d_alpha = exterior_derivative(alpha)
    betas = [wedge(interior_product(VectorField.coordinate(ambient, a), d_alpha), alpha) for a in ambient]
    matrix: List[List[MultiPoly]] = [list(alpha.as_vector())]
    for index in itertools.combinations(range(n), 2):
        matrix.append([beta.coefficient(index) for beta in betas])
    witness = generic_rank_matrix(matrix)
    if witness.rank != n - 1:
        raise VerificationFailure(f"characteristic system has rank {witness.rank}, expected {n - 1}")
    (kernel,) = _cramer_kernel(matrix, witness)
    W = VectorField(ambient, _normalize(kernel))
    for Ei in E.basis():
        if not span_contains(lie_bracket(W, Ei), E.basis()):
            raise VerificationFailure(f"[W, {Ei}] leaves E")
    return W


@dataclass(frozen=True)
class EngelFlag:
    """The flag W ⊂ D ⊂ E of an Engel structure with its defining forms."""

    W: VectorField
    D: DistributionFrame
    E: DistributionFrame
    d_forms: Tuple[DiffForm, ...]
    e_forms: Tuple[DiffForm, ...]
    ok: bool = field(default=True, init=False)

    @property
    def defining_forms(self) -> Tuple[DiffForm, ...]:
        return self.d_forms + self.e_forms


@dataclass(frozen=True)
class FlagFailure:
    """Why a rank-2 distribution is not Engel."""

    stage: str
    detail: str
    observed_rank: Optional[int] = None
    ok: bool = field(default=False, init=False)


def check_engel(D: Union[DistributionFrame, Sequence[VectorField]]) -> Union[EngelFlag, FlagFailure]:
    """Verify the Engel conditions for D and build its flag.

    Stages in order: rank-2, rank-3 (E = D + [D, D]), even-contact,
    characteristic, W-in-D.
    """
    fields = list(D.fields if isinstance(D, DistributionFrame) else D)
    if not fields or len(fields[0].ambient) != 4:
        raise InvalidInput("Engel checks need fields on a 4-dimensional ambient")
    if isinstance(D, DistributionFrame) and D.claimed_rank != 2:
        raise InvalidInput(f"D must be claimed rank 2, got {D.claimed_rank}")

    witness = generic_rank_witness(fields)
    if witness.rank != 2:
        return FlagFailure("rank-2", f"D has generic rank {witness.rank}", witness.rank)
    D1, D2 = (fields[i] for i in witness.rows)
    D_frame = D if isinstance(D, DistributionFrame) else DistributionFrame([D1, D2], 2)

    e_fields = [D1, D2, lie_bracket(D1, D2)]
    e_rank = generic_rank(e_fields)
    if e_rank != 3:
        return FlagFailure("rank-3", f"D + [D, D] has generic rank {e_rank}", e_rank)
    E_frame = DistributionFrame(e_fields, 3)

    if not check_even_contact(E_frame):
        return FlagFailure("even-contact", "E + [E, E] does not span the tangent space")
    try:
        W = characteristic_line_field(E_frame)
    except VerificationFailure as exc:
        return FlagFailure("characteristic", str(exc))
    if not span_contains(W, [D1, D2]):
        return FlagFailure("W-in-D", f"characteristic field {W} is not in D")

    flag = EngelFlag(W, D_frame, E_frame, annihilator_forms(D_frame), annihilator_forms(E_frame))
    logger.debug("Engel flag verified: W = %s", W)
    return flag
