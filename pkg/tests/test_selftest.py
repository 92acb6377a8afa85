"""Tests for the invariant suite."""

import json
import time

import pytest

from obstructa.complexes import validate_complex
from obstructa.selftest import (
    CriterionResult,
    SelftestReport,
    check_boolean_colimits,
    check_boolean_preservation,
    check_determinism,
    check_dualities,
    check_handcrafted_case,
    check_obstruction_kernel,
    check_regularity_collapse,
    check_spectrum_limits,
    check_tri_equivalence,
    check_uncolorable_datasets,
    generate_complexes,
    handcrafted_cases,
    pipeline_json,
)


class TestGeneratedComplexes:
    """Test the deterministic complex family."""

    def test_default_suite(self):
        suite = generate_complexes()
        assert len(suite) == 50
        assert len({c.name for c in suite}) == 50
        assert all(validate_complex(c).ok for c in suite)

    def test_dimension_two_first(self):
        """Five single bases and ten disjoint pairs of Q^2."""
        suite = generate_complexes()
        assert [c.dimension for c in suite[:15]] == [2] * 15
        assert suite[15].dimension == 3

    def test_truncation_is_a_prefix(self):
        assert [c.name for c in generate_complexes(20)] == [c.name for c in generate_complexes()[:20]]

    def test_within_size_limits(self):
        for c in generate_complexes():
            assert len(c.bases) <= 4
            assert len(c.rays) <= 12


class TestHandcrafted:
    """Test the handcrafted finite categories."""

    @pytest.mark.parametrize("case", handcrafted_cases(), ids=lambda case: case.name)
    def test_case_behaves_as_expected(self, case):
        assert check_handcrafted_case(case) is None

    def test_expected_applicability_is_mixed(self):
        flags = {case.applicable for case in handcrafted_cases()}
        assert flags == {True, False}


class TestCriteria:
    """Test individual criteria."""

    def test_tri_equivalence_on_small_suite(self):
        result = check_tri_equivalence(generate_complexes(20))
        assert result.ok, result.message
        assert result.detail["complexes"] == 20

    def test_boolean_preservation_on_small_suite(self):
        assert check_boolean_preservation(generate_complexes(10)).ok

    def test_pipeline_json_is_thread_independent(self):
        one = pipeline_json("shared_ray_d3", threads=1)
        assert one == pipeline_json("shared_ray_d3", threads=2)
        assert json.loads(one)["colorings"] == 5

    @pytest.mark.slow
    def test_uncolorable_datasets(self):
        result = check_uncolorable_datasets()
        assert result.ok, result.message
        assert result.detail["peres24_d4"]["colorings"] == 0

    @pytest.mark.slow
    def test_boolean_colimits(self):
        result = check_boolean_colimits()
        assert result.ok, result.message
        assert result.detail["shared_ray_d3"] == 32

    @pytest.mark.slow
    def test_spectrum_limits(self):
        assert check_spectrum_limits().ok

    @pytest.mark.slow
    def test_dualities(self):
        result = check_dualities()
        assert result.ok, result.message
        assert result.detail["stone_algebras"] == 5

    @pytest.mark.slow
    def test_regularity_collapse(self):
        started = time.perf_counter()
        result = check_regularity_collapse()
        assert result.ok, result.message
        assert result.detail["frames"] == 3635
        assert time.perf_counter() - started < 30

    @pytest.mark.slow
    def test_obstruction_kernel(self):
        started = time.perf_counter()
        result = check_obstruction_kernel()
        assert result.ok, result.message
        assert result.detail["handcrafted"] == len(handcrafted_cases())
        assert time.perf_counter() - started < 10

    @pytest.mark.slow
    def test_tri_equivalence_on_full_suite(self):
        result = check_tri_equivalence(generate_complexes())
        assert result.ok, result.message
        assert result.detail["complexes"] == 50

    @pytest.mark.slow
    def test_determinism_across_thread_counts(self):
        result = check_determinism(max_threads=4)
        assert result.ok, result.message
        assert result.detail["threads"] == [1, 2, 4]


class TestReport:
    """Test result aggregation."""

    def test_fail_keeps_first_message(self):
        result = CriterionResult("x").fail("first").fail("second")
        assert not result.ok
        assert result.message == "first"

    def test_report_dict(self):
        report = SelftestReport([CriterionResult("a"), CriterionResult("b").fail("broken")])
        assert not report.ok
        data = report.to_dict()
        assert data["passed"] is False
        assert data["criteria"][1] == {"name": "b", "passed": False, "elapsed": 0.0, "message": "broken"}
