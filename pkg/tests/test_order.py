"""Tests for finite posets, distributive lattices and their colimits."""

import pytest

from obstructa.cat import Arrow, Diagram, NonCommutingDiagramError
from obstructa.order import (
    DLatHom,
    DownsetLattice,
    FinPoset,
    MonotoneMap,
    NotALatticeError,
    TableLattice,
    compatible_families,
    dlat_colimit,
    dlat_colimit_oracle,
    downsets,
    homs_to_two,
    identity_hom,
    is_boolean_lattice,
    join_irreducibles,
    lattice_isomorphism,
    materialize,
    poset_isomorphism,
    poset_limit,
    small_posets,
    validate_distributive,
    validate_dlat_hom,
)


def boolean(*points) -> DownsetLattice:
    return downsets(FinPoset.antichain(points))


def pentagon() -> TableLattice:
    order = {("0", "a"), ("a", "b"), ("0", "b"), ("0", "c"), ("b", "1"), ("c", "1"), ("a", "1"), ("0", "1")}
    return TableLattice.from_order(["0", "a", "b", "c", "1"], lambda x, y: x == y or (x, y) in order)


def diamond_m3() -> TableLattice:
    return TableLattice.from_order(
        ["0", "a", "b", "c", "1"],
        lambda x, y: x == y or x == "0" or y == "1",
    )


class TestFinPoset:
    """Test poset construction and validation."""

    def test_chain_closure(self):
        """A 3-chain has 6 order pairs after reflexive-transitive closure."""
        P = FinPoset.chain(3)
        assert len(P.leq) == 6
        assert P.le(0, 2)
        assert P.validate().ok

    def test_antichain(self):
        P = FinPoset.antichain(["x", "y"])
        assert P.is_antichain()
        assert not P.le("x", "y")

    def test_cycle_fails_antisymmetry(self):
        """A 2-cycle closes to a preorder that is not a poset."""
        P = FinPoset.from_relation([0, 1], [(0, 1), (1, 0)])
        report = P.validate()
        assert not report.ok
        assert report.law == "antisymmetric"

    def test_down_and_up(self):
        P = FinPoset.chain(3)
        assert P.down(1) == frozenset({0, 1})
        assert P.up(1) == frozenset({1, 2})

    def test_monotone_map(self):
        P = FinPoset.chain(2)
        assert MonotoneMap(P, P, lambda x: x).is_monotone()
        assert not MonotoneMap(P, P, lambda x: 1 - x).is_monotone()

    def test_isomorphism(self):
        P = FinPoset.from_relation("abc", [("a", "b"), ("b", "c")])
        assert poset_isomorphism(P, FinPoset.chain(3)) == {"a": 0, "b": 1, "c": 2}
        assert poset_isomorphism(P, FinPoset.antichain([0, 1, 2])) is None


class TestLattices:
    """Test lattice representations and law checks."""

    def test_downset_counts(self):
        """Downsets of an n-antichain number 2^n; of an n-chain, n + 1."""
        assert boolean("x", "y", "z").size == 8
        assert downsets(FinPoset.chain(3)).size == 4
        L = boolean("x", "y")
        assert len(L.elements) == L.size == 4

    def test_downsets_are_distributive(self):
        assert validate_distributive(downsets(FinPoset.chain(2))).ok
        assert validate_distributive(boolean("x", "y", "z")).ok

    def test_pentagon_not_distributive(self):
        report = validate_distributive(pentagon())
        assert not report.ok
        assert report.law == "distributive"

    def test_m3_not_distributive(self):
        assert not validate_distributive(diamond_m3()).ok

    def test_from_order_rejects_non_lattice(self):
        """Two incomparable maximal elements have no join."""
        with pytest.raises(NotALatticeError):
            TableLattice.from_order(["0", "a", "b"], lambda x, y: x == y or x == "0")

    def test_boolean_detection(self):
        assert is_boolean_lattice(boolean("x", "y"))
        assert not is_boolean_lattice(downsets(FinPoset.chain(2)))
        assert is_boolean_lattice(materialize(boolean("x", "y")))

    def test_complement(self):
        L = boolean("x", "y")
        assert L.complement(frozenset({"x"})) == frozenset({"y"})
        assert downsets(FinPoset.chain(2)).complement(frozenset({0})) is None

    def test_materialize_is_isomorphic(self):
        L = downsets(FinPoset.chain(2))
        M = materialize(L, relabel=True)
        assert M.elements == (0, 1, 2)
        assert lattice_isomorphism(L, M) is not None
        assert lattice_isomorphism(L, boolean("x", "y")) is None


class TestBirkhoff:
    """Test the join-irreducible / downset round trip."""

    def test_round_trip_on_chain(self):
        P = FinPoset.chain(3)
        assert poset_isomorphism(join_irreducibles(downsets(P)), P) is not None

    def test_join_irreducibles_of_tables(self):
        """The 4-element Boolean algebra as explicit tables has two incomparable join-irreducibles."""
        L = materialize(boolean("x", "y"))
        J = join_irreducibles(L)
        assert len(J) == 2
        assert J.is_antichain()

    def test_small_poset_counts(self):
        """Distributive lattices with 1..6 elements: 1, 1, 1, 2, 3, 5."""
        assert len(small_posets(4)) == 5
        assert len(small_posets(6)) == 13

    @pytest.mark.slow
    def test_round_trip_all_small(self):
        for P in small_posets(8):
            assert poset_isomorphism(join_irreducibles(downsets(P)), P) is not None


class TestHoms:
    """Test lattice homomorphism checks."""

    def test_identity_is_hom(self):
        assert validate_dlat_hom(identity_hom(boolean("x", "y"))).ok

    def test_constant_map_is_not_hom(self):
        L = boolean("x", "y")
        report = validate_dlat_hom(DLatHom(L, L, lambda u: frozenset()))
        assert not report.ok
        assert report.law == "top"

    def test_homs_to_two(self):
        """A Boolean algebra with 2 atoms has 2 homs to {0,1}; a 3-chain lattice has 2."""
        assert len(homs_to_two(boolean("x", "y"))) == 2
        assert len(homs_to_two(downsets(FinPoset.chain(2)))) == 2


class TestLimitsAndColimits:
    """Test poset limits and distributive-lattice colimits."""

    def test_compatible_families(self):
        arrows = [Arrow("a", "b", lambda v: v % 2)]
        families = compatible_families(["a", "b"], {"a": [0, 1, 2, 3], "b": [1]}, arrows)
        assert families == [(1, 1), (3, 1)]

    def test_compatible_families_empty_domain(self):
        assert compatible_families(["a"], {"a": []}, []) == []

    def test_poset_limit_of_identity_arrow(self):
        P = FinPoset.chain(2)
        D = Diagram({"p": P, "q": P}, (Arrow("p", "q", lambda x: x),))
        limit = poset_limit(D)
        assert limit.poset.elements == ((0, 0), (1, 1))
        assert limit.projections["q"]((1, 1)) == 1

    def test_colimit_of_single_arrow(self):
        """The colimit of 2 -> B is B."""
        two, B = boolean("a"), boolean("x", "y")
        h = DLatHom(two, B, lambda u: frozenset({"x", "y"}) if u else frozenset())
        colimit = dlat_colimit(Diagram({"A": two, "B": B}, (Arrow("A", "B", h),)))
        assert colimit.lattice.size == 4

    def test_coproduct_over_two_matches_oracle(self):
        """Gluing two 4-element Boolean algebras along 2 gives 16 elements, as the oracle does."""
        two, B, C = boolean("a"), boolean("x", "y"), boolean("p", "q")
        to_b = DLatHom(two, B, lambda u: B.top if u else B.bottom)
        to_c = DLatHom(two, C, lambda u: C.top if u else C.bottom)
        D = Diagram({"A": two, "B": B, "C": C}, (Arrow("A", "B", to_b), Arrow("A", "C", to_c)))
        colimit = dlat_colimit(D)
        assert colimit.lattice.size == 16
        assert is_boolean_lattice(colimit.lattice)
        assert len(dlat_colimit_oracle(D).elements) == 16

    def test_cocone_maps_are_homs(self):
        two, B = boolean("a"), boolean("x", "y")
        h = DLatHom(two, B, lambda u: B.top if u else B.bottom)
        colimit = dlat_colimit(Diagram({"A": two, "B": B}, (Arrow("A", "B", h),)))
        for leg in colimit.cocone.values():
            assert validate_dlat_hom(leg).ok

    def test_non_commuting_diagram_raises(self):
        B, C = boolean("x", "y"), boolean("p", "q")
        straight = {"x": "p", "y": "q"}
        swapped = {"x": "q", "y": "p"}
        f = DLatHom(B, C, lambda u: frozenset(straight[e] for e in u))
        g = DLatHom(B, C, lambda u: frozenset(swapped[e] for e in u))
        D = Diagram({"B": B, "C": C}, (Arrow("B", "C", f), Arrow("B", "C", g)))
        with pytest.raises(NonCommutingDiagramError):
            dlat_colimit(D)
