"""Tests for spectrum functors, limits over frame complexes and the no-go pipeline."""

import pytest

from obstructa.cat import Arrow, FunctorData, reflects_initial, thin_category, validate_category, validate_functor
from obstructa.complexes import ConfigurationError, complex_from_json, subalgebra_diagram
from obstructa.locale import validate_locale_map
from obstructa.pba import mo, oml_to_pba
from obstructa.reports import PropertyViolation
from obstructa.spectra import (
    AlgHom,
    AlgebraDiagram,
    CommAlgObject,
    SpectrumFunctor,
    character_families,
    check_functoriality,
    complex_boolean_colimit,
    complex_spectrum_limit,
    compose_alg_homs,
    finite_sets_category,
    idempotents,
    identity_alg_hom,
    nogo_pipeline,
    pierce_vs_gelfand_nat,
    ringed_toy,
    spectra_agree,
    spectrum,
    spectrum_on,
    stone_pipeline,
)

ALGEBRAIC = [SpectrumFunctor.GELFAND, SpectrumFunctor.ZARISKI, SpectrumFunctor.PIERCE]


class TestAlgebraModels:
    """Test C^k objects and their homs."""

    def test_rejects_bad_objects(self):
        with pytest.raises(ValueError):
            CommAlgObject.of(0)
        with pytest.raises(ValueError):
            CommAlgObject(2, ("x", "x"))

    def test_hom_action_on_idempotents(self):
        """The diagonal C -> C^2 sends 1 to (1, 1)."""
        h = AlgHom(CommAlgObject.of(1), CommAlgObject.of(2), (0, 0))
        assert h(1) == 0b11
        assert h(0) == 0

    def test_hom_rejects_bad_dual(self):
        with pytest.raises(ValueError):
            AlgHom(CommAlgObject.of(1), CommAlgObject.of(2), (0, 1))

    def test_composition(self):
        A, B, C = CommAlgObject.of(1), CommAlgObject.of(2), CommAlgObject.of(3)
        f = AlgHom(A, B, (0, 0))
        g = AlgHom(B, C, (0, 1, 1))
        gf = compose_alg_homs(g, f)
        assert gf.dual == (0, 0, 0)
        assert gf(1) == g(f(1))

    def test_idempotents(self):
        assert idempotents(CommAlgObject.of(3)).size == 8

    def test_diagram_type_check(self):
        with pytest.raises(TypeError):
            AlgebraDiagram({"x": "not an algebra"})


class TestSpectrumFunctors:
    """Test the spectrum functors on objects and homs."""

    @pytest.mark.parametrize("functor", list(SpectrumFunctor))
    def test_discrete_on_characters(self, functor):
        frame = spectrum(functor, CommAlgObject.of(3))
        assert frame.size == 8

    @pytest.mark.parametrize("functor", list(SpectrumFunctor))
    def test_identity_goes_to_identity(self, functor):
        A = CommAlgObject.of(2)
        m = spectrum_on(functor, identity_alg_hom(A))
        assert validate_locale_map(m).ok
        assert m.signature() == tuple(spectrum(functor, A).elements)

    @pytest.mark.parametrize("functor", ALGEBRAIC)
    def test_functoriality_on_complex(self, shared_ray, functor):
        assert check_functoriality(functor, subalgebra_diagram(shared_ray)).ok

    def test_spectra_agree(self, shared_ray):
        assert spectra_agree(subalgebra_diagram(shared_ray)).ok

    def test_pierce_gelfand_natural(self, shared_ray):
        report = pierce_vs_gelfand_nat(subalgebra_diagram(shared_ray))
        assert report.ok
        assert report.detail["squares"] == 2

    def test_character_families_are_colorings(self, shared_ray, single_basis):
        assert len(character_families(subalgebra_diagram(shared_ray))) == 5
        assert len(character_families(subalgebra_diagram(single_basis))) == 3

    def test_functoriality_counts_composable_pairs(self):
        """C -> C^2 -> C^2 has one composable pair."""
        A, B, C = CommAlgObject.of(1), CommAlgObject.of(2), CommAlgObject.of(2)
        D = AlgebraDiagram(
            {"a": A, "b": B, "c": C},
            (Arrow("a", "b", AlgHom(A, B, (0, 0))), Arrow("b", "c", AlgHom(B, C, (1, 0)))),
        )
        report = check_functoriality(SpectrumFunctor.GELFAND, D)
        assert report.ok
        assert report.detail["composable_pairs"] == 1


class TestComplexLimits:
    """Test the Boolean colimit and spectrum limits of frame complexes."""

    @pytest.mark.parametrize("fixture, size", [
        ("single_basis", 8),
        ("shared_ray", 32),
        ("two_disjoint_bases", 16),
    ])
    def test_boolean_colimit(self, request, fixture, size):
        c = request.getfixturevalue(fixture)
        colimit = complex_boolean_colimit(c)
        assert colimit.size == size

    @pytest.mark.parametrize("functor", list(SpectrumFunctor))
    def test_spectrum_limit_points_are_colorings(self, shared_ray, functor):
        limit = complex_spectrum_limit(shared_ray, functor)
        assert limit.point_count == 5
        assert limit.frame.size == 32

    @pytest.mark.slow
    def test_uncolorable_limit_is_initial(self, peres24):
        assert complex_boolean_colimit(peres24).size == 1
        assert complex_spectrum_limit(peres24).frame.size == 1

    def test_stone_pipeline_on_mo2(self):
        report = stone_pipeline(oml_to_pba(mo(2)))
        assert report.points == 4
        assert not report.initial
        assert report.to_dict()["nodes"] == 3


class TestFiniteDiscreteLocales:
    """Test the category of finite discrete locales and the ringed toy."""

    def test_finite_sets(self):
        D = finite_sets_category([0, 1, 2])
        assert validate_category(D).ok
        assert D.initial_objects() == [0]
        assert D.is_terminal(1)
        assert len(D.hom(2, 2)) == 4

    def test_forgetful_reflects_initial(self):
        _, U = ringed_toy(finite_sets_category([0, 1, 2]))
        assert reflects_initial(U)

    def test_ringed_toy_is_a_category(self):
        R, U = ringed_toy(finite_sets_category([0, 1, 2]))
        assert validate_category(R).ok
        assert validate_functor(U).ok
        assert R.initial_objects() == [()]

    def test_forgetful_is_not_an_isomorphism(self):
        """Dual-number stalks add objects over the same point count and extra maps over one function."""
        D = finite_sets_category([0, 1, 2])
        R, U = ringed_toy(D)
        assert len(R.objects) == 6
        assert sorted({U.ob(X) for X in R.objects}) == list(D.objects)
        dual = ("C[e]",)
        over_identity = [m for m in R.hom(dual, dual) if U.mor(m) == D.identity(1)]
        assert len(over_identity) == 2

    def test_ringed_space_check_fails_without_reflection(self, single_basis, mocker):
        """A structure over the empty space that is not initial breaks the derived ringed-space check."""
        D = finite_sets_category([0, 1])
        R = thin_category(["empty", "ghost"], lambda a, b: a == b or a == "empty")
        U = FunctorData(R, D, lambda a: 0, lambda m: D.identity(0), name="U")
        assert not reflects_initial(U)
        mocker.patch("obstructa.spectra.ringed_toy", return_value=(R, U))
        with pytest.raises(PropertyViolation, match="derived:ringed-space"):
            nogo_pipeline(single_basis)


class TestPipeline:
    """Test the full no-go pipeline."""

    def test_shared_ray(self, shared_ray):
        report = nogo_pipeline(shared_ray)
        assert report.colorings == 5
        assert report.boolean_colimit_size == 32
        assert report.limit_points == 5
        assert not report.initial
        assert report.ok
        assert not report.obstruction.applicable

    def test_json_keys(self, single_basis):
        data = nogo_pipeline(single_basis).to_json_dict()
        assert sorted(data) == [
            "booleanColimitSize", "checks", "colorings", "functor", "initial", "limitOpens", "limitPoints",
        ]
        assert data["functor"] == "gelfand"
        assert all(check["passed"] for check in data["checks"])

    def test_stone_route(self, shared_ray):
        report = nogo_pipeline(shared_ray, SpectrumFunctor.STONE)
        assert report.limit_points == 5
        assert report.functor is SpectrumFunctor.STONE

    def test_dimension_two_is_flagged(self, two_disjoint_bases):
        report = nogo_pipeline(two_disjoint_bases)
        assert report.colorings == 4
        hypothesis = next(c for c in report.checks if c.name == "dimension-hypothesis")
        assert hypothesis.detail["theoremsApply"] is False

    def test_invalid_complex(self):
        c = complex_from_json({"dimension": 2, "field": "Q", "rays": [["1", "0"], ["1", "1"]], "bases": [[0, 1]]})
        with pytest.raises(ConfigurationError):
            nogo_pipeline(c)

    @pytest.mark.slow
    @pytest.mark.parametrize("fixture", ["peres24", "peres33"])
    def test_uncolorable_is_obstructed(self, request, fixture):
        report = nogo_pipeline(request.getfixturevalue(fixture))
        assert report.colorings == 0
        assert report.boolean_colimit_size == 1
        assert report.initial
        assert report.obstruction.applicable
        assert report.obstruction.ok
