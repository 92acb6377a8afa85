"""Tests for finite categories, limits and the obstruction check."""

import pytest

from obstructa.cat import (
    Arrow,
    CategoryError,
    CommutingSquare,
    ConeData,
    Diagram,
    DiagramData,
    FunctorData,
    Morphism,
    TabulatedCategory,
    check_obstruction_theorem,
    cones_from,
    discrete_category,
    identity_functor,
    is_cone,
    is_obstructed,
    limit,
    mediating_morphism,
    preserves_initial,
    reflects_initial,
    strict_initials,
    thin_category,
    thin_functor,
    validate_category,
    validate_functor,
    validate_square,
    verify_limit,
)


def chain(n: int) -> TabulatedCategory:
    return thin_category(range(n), lambda a, b: a <= b, name=f"chain{n}")


def diamond() -> TabulatedCategory:
    order = {("bot", "a"), ("bot", "b"), ("bot", "top"), ("a", "top"), ("b", "top")}
    return thin_category(["bot", "a", "b", "top"], lambda x, y: x == y or (x, y) in order, name="diamond")


def pair_diagram(C: TabulatedCategory, left, right) -> DiagramData:
    shape = discrete_category(["l", "r"])
    return DiagramData(shape, thin_functor(shape, C, {"l": left, "r": right}))


def identity_square(C) -> CommutingSquare:
    ident = identity_functor(C)
    return CommutingSquare(ident, ident, ident, ident)


def split_idempotent() -> TabulatedCategory:
    """Initial object 0 with a retraction g: x -> 0 that is not an isomorphism."""
    morphisms = {
        "id0": ("0", "0"), "idx": ("x", "x"),
        "f": ("0", "x"), "g": ("x", "0"), "h": ("x", "x"),
    }
    table = {
        ("id0", "id0"): "id0", ("idx", "idx"): "idx",
        ("f", "id0"): "f", ("idx", "f"): "f",
        ("g", "idx"): "g", ("id0", "g"): "g",
        ("h", "idx"): "h", ("idx", "h"): "h",
        ("g", "f"): "id0", ("f", "g"): "h",
        ("h", "h"): "h", ("h", "f"): "f", ("g", "h"): "g",
    }
    return TabulatedCategory(["0", "x"], morphisms, {"0": "id0", "x": "idx"}, table)


class TestCategories:
    """Test category construction and law checks."""

    def test_chain(self):
        C = chain(3)
        assert validate_category(C).ok
        assert len(C.morphisms()) == 6
        assert C.initial_objects() == [0]
        assert C.is_terminal(2)

    def test_thin_category_requires_preorder(self):
        with pytest.raises(CategoryError):
            thin_category([0, 1], lambda a, b: a < b)
        with pytest.raises(CategoryError):
            thin_category([0, 1, 2], lambda a, b: a == b or (a, b) in {(0, 1), (1, 2)})

    def test_discrete(self):
        assert discrete_category(["x", "y"]).initial_objects() == []
        assert discrete_category(["x"]).initial_objects() == ["x"]

    def test_unknown_endpoints(self):
        with pytest.raises(CategoryError):
            TabulatedCategory(["x"], {"f": ("x", "y")}, {"x": "f"}, {})

    def test_broken_identity_detected(self):
        table = {("id", "id"): "id", ("id", "e"): "id", ("e", "id"): "e", ("e", "e"): "e"}
        C = TabulatedCategory(["*"], {"id": ("*", "*"), "e": ("*", "*")}, {"*": "id"}, table)
        report = validate_category(C)
        assert not report.ok
        assert report.law == "identity"

    def test_split_idempotent_is_category(self):
        C = split_idempotent()
        assert validate_category(C).ok
        assert C.initial_objects() == ["0"]

    def test_iso(self):
        C = split_idempotent()
        assert not C.is_iso(Morphism("x", "0", "g"))
        assert C.is_iso(C.identity("x"))


class TestFunctors:
    """Test functor checks and initial-object behavior."""

    def test_thin_functor(self):
        F = thin_functor(chain(3), chain(2), {0: 0, 1: 1, 2: 1})
        assert validate_functor(F).ok

    def test_thin_functor_rejects_non_monotone(self):
        F = thin_functor(chain(2), chain(2), {0: 1, 1: 0})
        with pytest.raises(CategoryError):
            F.mor(Morphism(0, 1, (0, 1)))

    def test_table_functor_breaking_identity(self):
        C = chain(2)
        F = FunctorData.from_tables(C, C, {0: 0, 1: 1}, {(0, 0): (0, 1), (1, 1): (1, 1), (0, 1): (0, 1)})
        report = validate_functor(F)
        assert not report.ok
        assert report.law == "identity"

    def test_preserves_and_reflects_initial(self):
        embed = thin_functor(chain(2), chain(3), {0: 0, 1: 2})
        assert preserves_initial(embed)
        assert reflects_initial(embed)
        collapse = thin_functor(chain(2), chain(1), {0: 0, 1: 0})
        assert preserves_initial(collapse)
        assert not reflects_initial(collapse)

    def test_strict_initials(self):
        assert strict_initials(diamond()).ok
        report = strict_initials(split_idempotent())
        assert not report.ok
        assert report.law == "strictness"


class TestLimits:
    """Test cones and limits in finite categories."""

    def test_product_is_meet(self):
        C = diamond()
        D = pair_diagram(C, "a", "b")
        cone = limit(C, D)
        assert cone.apex == "bot"
        assert verify_limit(D, cone).ok

    def test_limit_of_single_object(self):
        C = diamond()
        cone = limit(C, pair_diagram(C, "a", "a"))
        assert cone.apex == "a"

    def test_empty_diagram_gives_terminal(self):
        C = diamond()
        shape = discrete_category([])
        cone = limit(C, DiagramData(shape, thin_functor(shape, C, {})))
        assert cone.apex == "top"

    def test_no_limit_without_cones(self):
        C = discrete_category(["x", "y"])
        assert limit(C, pair_diagram(C, "x", "y")) is None

    def test_cones_from(self):
        C = diamond()
        D = pair_diagram(C, "a", "b")
        assert len(cones_from(D, "bot")) == 1
        assert cones_from(D, "a") == []

    def test_is_cone_rejects_wrong_leg(self):
        C = diamond()
        D = pair_diagram(C, "a", "b")
        bad = ConeData("bot", {"l": C.identity("bot"), "r": C.hom("bot", "b")[0]})
        assert not is_cone(D, bad)

    def test_limit_requires_matching_category(self):
        C = diamond()
        with pytest.raises(CategoryError):
            limit(diamond(), pair_diagram(C, "a", "b"))


class TestObstruction:
    """Test commuting squares and the obstruction check."""

    def test_identity_square_commutes(self):
        assert validate_square(identity_square(diamond())).ok

    def test_obstructed_apex(self):
        """bot maps to both a and b, and the limit of (a, b) is the initial bot."""
        C = diamond()
        result = check_obstruction_theorem(identity_square(C), "bot", pair_diagram(C, "a", "b"))
        assert result.applicable
        assert result.ok
        assert result.conclusion.detail["image"] == "bot"

    def test_no_cone_means_not_applicable(self):
        C = diamond()
        result = check_obstruction_theorem(identity_square(C), "a", pair_diagram(C, "a", "b"))
        assert not result.applicable
        assert result.conclusion is None
        failed = [h for h in result.hypotheses if not h.ok]
        assert [h.law for h in failed] == ["cone-from-X"]

    def test_non_initial_limit(self):
        C = diamond()
        result = check_obstruction_theorem(identity_square(C), "bot", pair_diagram(C, "a", "top"))
        assert not result.applicable
        assert "limit-initial" in [h.law for h in result.hypotheses]

    def test_is_obstructed(self):
        C = diamond()
        square = identity_square(C)
        assert is_obstructed("bot", pair_diagram(C, "a", "b"), square)
        assert not is_obstructed("a", pair_diagram(C, "a", "b"), square)
        assert not is_obstructed("bot", pair_diagram(C, "a", "top"), square)

    def test_mediating_morphism(self):
        C = diamond()
        D = pair_diagram(C, "a", "b")
        cone = cones_from(D, "bot")[0]
        mediation = mediating_morphism(identity_square(C), D, cone)
        assert mediation.morphism == C.identity("bot")
        assert mediation.limit_cone.apex == "bot"


class TestGraphDiagrams:
    """Test diagrams presented as graphs."""

    def test_unknown_node(self):
        with pytest.raises(CategoryError):
            Diagram({"a": None}, (Arrow("a", "b", None),))

    def test_paths_and_shape(self):
        D = Diagram({"a": None, "b": None, "c": None}, (Arrow("a", "b", None), Arrow("b", "c", None)))
        assert len(D.path("a", "c")) == 2
        assert D.path("c", "a") is None
        assert D.path("a", "a") == ()
        shape = D.shape()
        assert len(shape.hom("a", "c")) == 1
        assert shape.hom("c", "a") == ()
