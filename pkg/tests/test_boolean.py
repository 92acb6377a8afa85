"""Tests for finite Boolean algebras, Stone duality and Lindenbaum colimits."""

import pytest

from obstructa.boolean import (
    TERMINAL,
    TWO,
    BoolHom,
    FinBoolAlg,
    InvalidHomomorphismError,
    Presentation,
    bool_homs,
    boolean_colimit,
    characters,
    check_colimit_universal,
    diagram_presentation,
    enumerate_models,
    find_model,
    lindenbaum,
    stone_on_hom,
    stone_round_trip,
    stone_spectrum,
    validate_bool_hom,
)
from obstructa.cat import Arrow, Diagram, NonCommutingDiagramError
from obstructa.locale import validate_locale_map


def identity(B: FinBoolAlg) -> BoolHom:
    return BoolHom.from_dual(B, B, list(range(B.atom_count)))


class TestFinBoolAlg:
    """Test bitmask Boolean algebras."""

    def test_operations(self):
        B = FinBoolAlg(2)
        assert B.size == 4
        assert B.neg(0b01) == 0b10
        assert B.leq(0b01, 0b11)
        assert not B.leq(0b01, 0b10)
        assert B.atoms_of(0b11) == [0, 1]

    def test_terminal(self):
        assert TERMINAL.size == 1
        assert TERMINAL.bottom == TERMINAL.top

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            FinBoolAlg(-1)
        with pytest.raises(ValueError):
            FinBoolAlg(2, atom_labels=["a", "a"])


class TestHoms:
    """Test homomorphisms and characters."""

    def test_from_dual(self):
        B = FinBoolAlg(2)
        assert identity(B).images == (0, 1, 2, 3)
        assert BoolHom.from_dual(B, B, [1, 0]).images == (0, 2, 1, 3)

    def test_hom_counts(self):
        """Homs B_m -> B_n correspond to maps of atoms n -> m."""
        assert len(bool_homs(TWO, FinBoolAlg(2))) == 1
        homs = bool_homs(FinBoolAlg(2), FinBoolAlg(2))
        assert len(homs) == 4
        assert all(validate_bool_hom(h).ok for h in homs)
        assert bool_homs(TERMINAL, TWO) == []

    def test_characters(self):
        B = FinBoolAlg(3)
        chars = characters(B)
        assert len(chars) == 3
        assert all(validate_bool_hom(c).ok for c in chars)

    def test_zero_map_is_not_hom(self):
        B = FinBoolAlg(1)
        report = validate_bool_hom(BoolHom(B, B, (0, 0)))
        assert not report.ok
        assert report.law == "one"


class TestStone:
    """Test finite Stone duality."""

    def test_spectrum_has_one_point_per_atom(self):
        assert stone_spectrum(FinBoolAlg(3)).size == 8

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_round_trip(self, k):
        assert stone_round_trip(FinBoolAlg(k)).ok

    def test_stone_on_hom_is_locale_map(self):
        h = bool_homs(TWO, FinBoolAlg(2))[0]
        m = stone_on_hom(h)
        assert m.source.size == 4
        assert m.target.size == 2
        assert validate_locale_map(m).ok

    def test_stone_on_invalid_hom_raises(self):
        with pytest.raises(InvalidHomomorphismError):
            stone_on_hom(BoolHom(TWO, TWO, (0, 0)))


class TestPresentations:
    """Test CNF presentations and model enumeration."""

    def test_dimacs_output(self):
        P = Presentation(("a", "b"), ((1, -2),))
        assert P.to_dimacs(["example"]) == "c example\np cnf 2 1\n1 -2 0\n"

    def test_dimacs_parse(self):
        P = Presentation.from_dimacs("c comment\np cnf 3 2\n1 -3 0\n2 0\n")
        assert P.vars == ("1", "2", "3")
        assert P.clauses == ((1, -3), (2,))

    def test_dimacs_without_header_raises(self):
        with pytest.raises(ValueError):
            Presentation.from_dimacs("1 2 0\n")

    def test_enumerate_models(self):
        """a or b has three models, sorted lexicographically."""
        P = Presentation(("a", "b"), ((1, 2),))
        assert enumerate_models(P) == [(0, 1), (1, 0), (1, 1)]
        assert enumerate_models(P, threads=2) == [(0, 1), (1, 0), (1, 1)]

    def test_inconsistent_theory(self):
        P = Presentation(("a",), ((1,), (-1,)))
        assert enumerate_models(P) == []
        assert find_model(P) is None
        assert enumerate_models(Presentation(("a",), ((),))) == []

    def test_no_clauses(self):
        assert len(enumerate_models(Presentation(("a", "b", "c")))) == 8

    def test_lindenbaum(self):
        theory = lindenbaum(Presentation(("a", "b"), ((1, 2),)))
        assert theory.algebra.size == 8
        assert theory.interpretation["a"] == 0b110
        assert not theory.is_terminal


class TestBooleanColimit:
    """Test colimits of Boolean diagrams."""

    def test_terminal_node_gives_terminal_colimit(self):
        colimit = boolean_colimit(Diagram({"t": TERMINAL}))
        assert colimit.size == 1

    def test_single_node(self):
        colimit = boolean_colimit(Diagram({"b": FinBoolAlg(3)}))
        assert colimit.size == 8

    def test_pushout_over_two(self):
        """Two 4-element algebras glued along 2 give the 16-element coproduct."""
        B, C = FinBoolAlg(2), FinBoolAlg(2)
        D = Diagram(
            {"A": TWO, "B": B, "C": C},
            (Arrow("A", "B", bool_homs(TWO, B)[0]), Arrow("A", "C", bool_homs(TWO, C)[0])),
        )
        colimit = boolean_colimit(D)
        assert colimit.algebra.atom_count == 4
        assert all(validate_bool_hom(leg).ok for leg in colimit.cocone.values())
        assert check_colimit_universal(D, colimit, [TWO, FinBoolAlg(2)]).ok

    def test_isomorphism_identifies(self):
        B = FinBoolAlg(2)
        D = Diagram({"x": B, "y": FinBoolAlg(2)}, (Arrow("x", "y", BoolHom.from_dual(B, FinBoolAlg(2), [1, 0])),))
        assert boolean_colimit(D).algebra.atom_count == 2

    def test_threads_give_same_colimit(self):
        B, C = FinBoolAlg(2), FinBoolAlg(2)
        D = Diagram(
            {"A": TWO, "B": B, "C": C},
            (Arrow("A", "B", bool_homs(TWO, B)[0]), Arrow("A", "C", bool_homs(TWO, C)[0])),
        )
        assert boolean_colimit(D, threads=2).models == boolean_colimit(D).models

    def test_presentation_variables(self):
        P = diagram_presentation(Diagram({"b": FinBoolAlg(1)}))
        assert P.vars == ("b:0", "b:1")

    def test_non_commuting_raises(self):
        B, C = FinBoolAlg(2), FinBoolAlg(2)
        D = Diagram(
            {"B": B, "C": C},
            (Arrow("B", "C", BoolHom.from_dual(B, C, [0, 1])), Arrow("B", "C", BoolHom.from_dual(B, C, [1, 0]))),
        )
        with pytest.raises(NonCommutingDiagramError):
            boolean_colimit(D)
