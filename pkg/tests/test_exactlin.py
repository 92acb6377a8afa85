"""Tests for exact arithmetic in Q(sqrt2) and row reduction."""

from fractions import Fraction

import pytest

from obstructa.exactlin import (
    DimensionMismatchError,
    DomainError,
    ONE,
    RayVector,
    Scalar,
    ZERO,
    full_space,
    inner,
    orthogonal,
    rref,
    subspace_equal,
    zero_space,
)

SQRT2 = Scalar(0, 1)


class TestScalar:
    """Test field arithmetic."""

    def test_sqrt2_squared_is_two(self):
        """sqrt2 * sqrt2 should be exactly 2."""
        assert SQRT2 * SQRT2 == Scalar(2)

    def test_inverse(self):
        """(1 + sqrt2)^-1 = -1 + sqrt2."""
        x = Scalar(1, 1)
        assert x.inverse() == Scalar(-1, 1)
        assert x * x.inverse() == ONE

    def test_division_by_zero_raises(self):
        """Inverting zero should raise DomainError."""
        with pytest.raises(DomainError):
            ZERO.inverse()

    def test_mixed_int_arithmetic(self):
        """Ints and Fractions coerce on either side."""
        assert 2 * SQRT2 == Scalar(0, 2)
        assert SQRT2 + 1 == Scalar(1, 1)
        assert 1 - SQRT2 == Scalar(1, -1)
        assert Scalar(1) / 3 == Scalar(Fraction(1, 3))

    def test_norm(self):
        """Norm of a + b sqrt2 is a^2 - 2b^2."""
        assert Scalar(3, 2).norm() == Fraction(1)

    def test_parse_forms(self):
        """Coordinates parse from ints, rational strings and [rat, irr] pairs."""
        assert Scalar.parse(3) == Scalar(3)
        assert Scalar.parse("-1/2") == Scalar(Fraction(-1, 2))
        assert Scalar.parse(["0", "1"]) == SQRT2

    @pytest.mark.parametrize("raw", ["abc", "1/0", True, ["1"], 1.5])
    def test_parse_rejects_malformed(self, raw):
        """Malformed coordinates should raise ValueError."""
        with pytest.raises(ValueError):
            Scalar.parse(raw)

    def test_to_json(self):
        assert Scalar(Fraction(1, 2)).to_json() == "1/2"
        assert Scalar(1, -1).to_json() == ["1", "-1"]


class TestRayVector:
    """Test canonical projective form."""

    def test_scaling_gives_equal_rays(self):
        """Differently scaled vectors should compare equal."""
        assert RayVector.of(2, 4, 0) == RayVector.of(1, 2, 0)
        assert RayVector.of(-1, 1) == RayVector.of(1, -1)

    def test_sqrt2_scaling(self):
        """(sqrt2, 2) spans the same ray as (1, sqrt2)."""
        assert RayVector.of(SQRT2, Scalar(2)) == RayVector.of(1, SQRT2)

    def test_leading_coordinate_is_one(self):
        ray = RayVector.of(0, 3, 6)
        assert ray.coords[1] == ONE

    def test_zero_vector_raises(self):
        with pytest.raises(DomainError):
            RayVector.of(0, 0, 0)


class TestInnerProduct:
    """Test exact orthogonality."""

    def test_orthogonal_over_q(self):
        assert orthogonal(RayVector.of(1, 1, 0), RayVector.of(1, -1, 0))
        assert not orthogonal(RayVector.of(1, 1, 0), RayVector.of(1, 0, 0))

    def test_orthogonal_over_sqrt2(self):
        """(1, sqrt2) is orthogonal to (sqrt2, -1)."""
        assert orthogonal(RayVector.of(1, SQRT2), RayVector.of(SQRT2, -1))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            inner(RayVector.of(1, 0), RayVector.of(1, 0, 0))


class TestRref:
    """Test canonical subspace identity."""

    def test_same_span_same_class(self):
        """Different spanning sets of one plane give equal classes."""
        a = rref([RayVector.of(1, 0, 0), RayVector.of(0, 1, 0)])
        b = rref([RayVector.of(1, 1, 0), RayVector.of(1, -1, 0)])
        assert a == b
        assert subspace_equal(a, b)

    def test_rank(self):
        assert rref([[1, 2, 3], [2, 4, 6]]).rank == 1
        assert rref([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == full_space(3)

    def test_empty_needs_dim(self):
        with pytest.raises(DimensionMismatchError):
            rref([])
        assert rref([], dim=3) == zero_space(3)

    def test_contains(self):
        plane = rref([[1, 0, 0], [0, 1, 0]])
        line = rref([[1, 1, 0]])
        assert plane.contains(line)
        assert not line.contains(plane)

    def test_mixed_dimensions_raise(self):
        with pytest.raises(DimensionMismatchError):
            rref([[1, 0], [1, 0, 0]])
        with pytest.raises(DimensionMismatchError):
            subspace_equal(zero_space(2), zero_space(3))

    def test_sqrt2_plane(self):
        """The plane orthogonal to (1, sqrt2, 0) is spanned by e3 and (sqrt2, -1, 0)."""
        a = rref([[0, 0, 1], [SQRT2, -1, 0]])
        b = rref([[SQRT2, -1, 1], [SQRT2, -1, -1]])
        assert a == b
