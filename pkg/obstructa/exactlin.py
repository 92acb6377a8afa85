"""Exact arithmetic in Q(sqrt2) and exact linear algebra over it.

Orthogonality and subspace identity are decided here without floating point.
A Scalar is rat + irr*sqrt2 with both components stored as reduced Fractions.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, "Scalar"]


class DomainError(ArithmeticError):
    """Arithmetic outside the domain of the field (division by zero)."""
    pass


class DimensionMismatchError(DomainError):
    """Vectors or subspaces of different ambient dimension were combined."""
    pass


@dataclass(frozen=True, slots=True)
class Scalar:
    """An element rat + irr*sqrt2 of Q(sqrt2)."""

    rat: Fraction = Fraction(0)
    irr: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rat", Fraction(self.rat))
        object.__setattr__(self, "irr", Fraction(self.irr))

    @classmethod
    def coerce(cls, value: Number) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        raise TypeError(f"Cannot interpret {value!r} as a Scalar")

    @classmethod
    def parse(cls, raw: Union[str, int, Sequence[str]]) -> "Scalar":
        """Parse a JSON coordinate: "p/q", an int, or ["p/q", "r/s"] meaning p/q + (r/s)sqrt2.

        Raises:
            ValueError: If the coordinate is malformed
        """
        if isinstance(raw, bool):
            raise ValueError(f"Boolean is not a coordinate: {raw!r}")
        if isinstance(raw, (int, str)):
            return cls(_parse_fraction(raw))
        if isinstance(raw, (list, tuple)) and len(raw) == 2:
            return cls(_parse_fraction(raw[0]), _parse_fraction(raw[1]))
        raise ValueError(f"Malformed coordinate: {raw!r}")

    def to_json(self) -> Union[str, list[str]]:
        if self.irr == 0:
            return str(self.rat)
        return [str(self.rat), str(self.irr)]

    def is_zero(self) -> bool:
        return self.rat == 0 and self.irr == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: Number) -> "Scalar":
        other = Scalar.coerce(other)
        return Scalar(self.rat + other.rat, self.irr + other.irr)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.rat, -self.irr)

    def __sub__(self, other: Number) -> "Scalar":
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: Number) -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other: Number) -> "Scalar":
        other = Scalar.coerce(other)
        return Scalar(
            self.rat * other.rat + 2 * self.irr * other.irr,
            self.rat * other.irr + self.irr * other.rat,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm a^2 - 2b^2; zero only for the zero scalar since sqrt2 is irrational."""
        return self.rat * self.rat - 2 * self.irr * self.irr

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise DomainError("Division by zero in Q(sqrt2)")
        n = self.norm()
        return Scalar(self.rat / n, -self.irr / n)

    def __truediv__(self, other: Number) -> "Scalar":
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __repr__(self) -> str:
        if self.irr == 0:
            return f"Scalar({self.rat})"
        return f"Scalar({self.rat} + {self.irr}*sqrt2)"


ZERO = Scalar()
ONE = Scalar(1)


def _parse_fraction(raw: Union[str, int]) -> Fraction:
    if isinstance(raw, bool):
        raise ValueError(f"Boolean is not a rational: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if not isinstance(raw, str):
        raise ValueError(f"Rational must be a string 'p/q': {raw!r}")
    try:
        return Fraction(raw.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Malformed rational {raw!r}: {e}") from e


def _vector(coords: Iterable[Number]) -> tuple[Scalar, ...]:
    return tuple(Scalar.coerce(c) for c in coords)


@dataclass(frozen=True, slots=True)
class RayVector:
    """A nonzero vector kept in canonical projective form (first nonzero coordinate is 1).

    Differently scaled vectors spanning the same ray compare equal.
    """

    coords: tuple[Scalar, ...]

    def __post_init__(self):
        coords = _vector(self.coords)
        lead = next((c for c in coords if not c.is_zero()), None)
        if lead is None:
            raise DomainError("The zero vector does not span a ray")
        if lead != ONE:
            inv = lead.inverse()
            coords = tuple(c * inv for c in coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: Number) -> "RayVector":
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def to_json(self) -> list:
        return [c.to_json() for c in self.coords]

    def __repr__(self) -> str:
        return "RayVector(" + ", ".join(repr(c) for c in self.coords) + ")"


def canonical(coords: Iterable[Number]) -> RayVector:
    """Canonical ray spanned by a nonzero coordinate tuple."""
    return RayVector(tuple(coords))


def inner(u: Union[RayVector, Sequence[Number]], v: Union[RayVector, Sequence[Number]]) -> Scalar:
    """Real symmetric bilinear form; coordinates are real so no conjugation is applied.

    Raises:
        DimensionMismatchError: If the vectors have different lengths
    """
    a = u.coords if isinstance(u, RayVector) else _vector(u)
    b = v.coords if isinstance(v, RayVector) else _vector(v)
    if len(a) != len(b):
        raise DimensionMismatchError(f"inner of dimension {len(a)} and {len(b)}")
    total = ZERO
    for x, y in zip(a, b):
        total = total + x * y
    return total


def orthogonal(u: RayVector, v: RayVector) -> bool:
    return inner(u, v).is_zero()


@dataclass(frozen=True, slots=True)
class SubspaceClass:
    """A subspace identified by the reduced row echelon form of any spanning set.

    Two values are equal exactly when their canonical matrices are identical.
    """

    dim: int
    rows: tuple[tuple[Scalar, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def basis_matrix(self) -> tuple[tuple[Scalar, ...], ...]:
        return self.rows

    def contains(self, other: "SubspaceClass") -> bool:
        """True iff other is a subspace of self."""
        _check_dims(self, other)
        return rref(self.rows + other.rows, dim=self.dim).rank == self.rank

    def __repr__(self) -> str:
        return f"SubspaceClass(dim={self.dim}, rank={self.rank})"


def _check_dims(a: SubspaceClass, b: SubspaceClass) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"subspaces of dimension {a.dim} and {b.dim}")


def rref(vectors: Iterable[Union[RayVector, Sequence[Number]]], dim: int | None = None) -> SubspaceClass:
    """Canonical reduced row echelon form of the span of the given vectors.

    Args:
        vectors: Rays or raw coordinate sequences, all of one length
        dim: Ambient dimension, required when vectors is empty

    Returns:
        SubspaceClass of the span (rank 0 for an empty input)

    Raises:
        DimensionMismatchError: If the vectors disagree on dimension
    """
    rows = [list(v.coords if isinstance(v, RayVector) else _vector(v)) for v in vectors]
    if dim is None:
        if not rows:
            raise DimensionMismatchError("rref of an empty list needs an explicit dim")
        dim = len(rows[0])
    if any(len(r) != dim for r in rows):
        raise DimensionMismatchError(f"rref expected vectors of dimension {dim}")

    pivot_row = 0
    for col in range(dim):
        pivot = next((i for i in range(pivot_row, len(rows)) if not rows[i][col].is_zero()), None)
        if pivot is None:
            continue
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        inv = rows[pivot_row][col].inverse()
        rows[pivot_row] = [x * inv for x in rows[pivot_row]]
        for i in range(len(rows)):
            if i != pivot_row and not rows[i][col].is_zero():
                factor = rows[i][col]
                rows[i] = [x - factor * p for x, p in zip(rows[i], rows[pivot_row])]
        pivot_row += 1
        if pivot_row == len(rows):
            break

    return SubspaceClass(dim=dim, rows=tuple(tuple(r) for r in rows[:pivot_row]))


def subspace_equal(a: SubspaceClass, b: SubspaceClass) -> bool:
    """Identity of subspaces by canonical matrix.

    Raises:
        DimensionMismatchError: If the ambient dimensions differ
    """
    _check_dims(a, b)
    return a.rows == b.rows


def full_space(dim: int) -> SubspaceClass:
    return rref([[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)], dim=dim)


def zero_space(dim: int) -> SubspaceClass:
    return SubspaceClass(dim=dim, rows=())
