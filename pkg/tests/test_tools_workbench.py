"""Tests for workbench MCP tools."""

import json
from unittest.mock import MagicMock

import pytest

from obstructa.history import RunStatus
from obstructa.reports import CheckReport, PropertyViolation
from obstructa.tools.workbench import (
    boolean_colimit_of_configuration,
    color_configuration,
    export_dimacs,
    list_datasets,
    paste_configuration,
    run_pipeline,
    run_selftest,
    spectrum_limit,
    validate_configuration,
)


@pytest.fixture
def invalid_config(temp_dir):
    """A d=2 configuration whose only basis is not orthogonal."""
    path = temp_dir / "skew.json"
    path.write_text(json.dumps({"dimension": 2, "field": "Q", "rays": [["1", "0"], ["1", "1"]], "bases": [[0, 1]]}))
    return path


@pytest.fixture
def malformed_config(temp_dir):
    path = temp_dir / "malformed.json"
    path.write_text('{"dimension": 3,\n  "field": }')
    return path


# =============================================================================
# Loading and Validation Tool Tests
# =============================================================================


@pytest.mark.asyncio
async def test_list_datasets():
    """list_datasets should describe every bundled configuration."""
    result = await list_datasets()

    assert result["success"] is True
    assert result["count"] == 6
    by_name = {row["name"]: row for row in result["datasets"]}
    assert by_name["peres24_d4"]["rays"] == 24
    assert by_name["sqrt2_pair_d2"]["field"] == "Q(sqrt2)"


@pytest.mark.asyncio
async def test_validate_configuration_from_file(config_file):
    result = await validate_configuration(str(config_file))

    assert result["success"] is True
    assert result["valid"] is True
    assert len(result["digest"]) == 64


@pytest.mark.asyncio
async def test_validate_configuration_reports_law(invalid_config):
    """An invalid complex is a successful call with valid False."""
    result = await validate_configuration(str(invalid_config))

    assert result["success"] is True
    assert result["valid"] is False
    assert result["report"]["law"] == "orthogonality"


@pytest.mark.asyncio
async def test_validate_configuration_parse_error(malformed_config):
    result = await validate_configuration(str(malformed_config))

    assert result["success"] is False
    assert result["error_type"] == "ConfigParseError"
    assert result["line"] == 2


@pytest.mark.asyncio
async def test_unknown_source():
    result = await paste_configuration("no_such_dataset")

    assert result["success"] is False
    assert "error" in result


# =============================================================================
# Computation Tool Tests
# =============================================================================


@pytest.mark.asyncio
async def test_paste_configuration():
    result = await paste_configuration("shared_ray_d3")

    assert result["success"] is True
    assert result["stats"]["elements"] == 12
    assert result["stats"]["blocks"] == 2


@pytest.mark.asyncio
async def test_paste_rejects_invalid(invalid_config):
    result = await paste_configuration(str(invalid_config))

    assert result["success"] is False
    assert "orthogonality" in result["error"]


@pytest.mark.asyncio
async def test_color_configuration_enumerate():
    result = await color_configuration("single_basis_d3", mode="enumerate")

    assert result["success"] is True
    assert result["count"] == 3
    assert result["colorings"] == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]


@pytest.mark.asyncio
async def test_color_configuration_uncolorable():
    result = await color_configuration("peres24_d4", mode="find")

    assert result["success"] is True
    assert result["count"] == 0
    assert result["colorings"] == []


@pytest.mark.asyncio
async def test_color_configuration_bad_mode():
    result = await color_configuration("single_basis_d3", mode="sample")

    assert result["success"] is False


@pytest.mark.asyncio
async def test_export_dimacs(temp_dir):
    """export_dimacs should write the CNF and report its size."""
    out = temp_dir / "out" / "single.cnf"
    result = await export_dimacs("single_basis_d3", str(out))

    assert result["success"] is True
    assert result["variables"] == 3
    assert result["clauses"] == 4
    assert out.read_text().startswith("c ray 0 = var 1")


@pytest.mark.asyncio
async def test_boolean_colimit_of_configuration():
    result = await boolean_colimit_of_configuration("single_basis_d3")

    assert result["success"] is True
    assert result["atoms"] == 3
    assert result["size"] == 8
    assert result["terminal"] is False


@pytest.mark.asyncio
async def test_spectrum_limit():
    result = await spectrum_limit("shared_ray_d3", functor="zariski")

    assert result["success"] is True
    assert result["functor"] == "zariski"
    assert result["limitOpens"] == 32
    assert result["limitPoints"] == 5
    assert result["initial"] is False


@pytest.mark.asyncio
async def test_spectrum_limit_bad_functor():
    result = await spectrum_limit("shared_ray_d3", functor="hochster")

    assert result["success"] is False
    assert "functor" in result["error"]


# =============================================================================
# run_pipeline Tool Tests
# =============================================================================


@pytest.mark.asyncio
async def test_run_pipeline_records_pass(run_history):
    """A passing run is returned and logged with its counts."""
    result = await run_pipeline("shared_ray_d3", history=run_history)

    assert result["success"] is True
    assert result["report"]["colorings"] == 5
    record = await run_history.get_record(result["record_id"])
    assert record.status == RunStatus.PASSED
    assert record.colorings == 5
    assert record.initial is False


@pytest.mark.asyncio
async def test_run_pipeline_without_history():
    result = await run_pipeline("single_basis_d3")

    assert result["success"] is True
    assert "record_id" not in result


@pytest.mark.asyncio
async def test_run_pipeline_records_invalid(run_history, invalid_config):
    result = await run_pipeline(str(invalid_config), history=run_history)

    assert result["success"] is False
    record = await run_history.get_record(result["record_id"])
    assert record.status == RunStatus.INVALID
    assert record.colorings is None
    assert len(record.digest) == 64


@pytest.mark.asyncio
async def test_run_pipeline_records_violation(run_history, mocker):
    """A failed cross-check is logged as a violation with its checks."""
    failed = CheckReport(name="limit-points").fail("counts-equal", (5, 4))
    mocker.patch(
        "obstructa.tools.workbench.nogo_pipeline",
        side_effect=PropertyViolation("Pipeline cross-check failed: limit-points", [failed]),
    )

    result = await run_pipeline("shared_ray_d3", history=run_history)

    assert result["success"] is False
    assert result["checks"][0]["law"] == "counts-equal"
    record = await run_history.get_record(result["record_id"])
    assert record.status == RunStatus.VIOLATION
    assert record.report["checks"][0]["name"] == "limit-points"


@pytest.mark.asyncio
async def test_run_pipeline_bad_functor(run_history):
    result = await run_pipeline("shared_ray_d3", functor="nope", history=run_history)

    assert result["success"] is False
    assert (await run_history.get_statistics())["total"] == 0


@pytest.mark.asyncio
async def test_run_selftest_wraps_report(mocker):
    report = MagicMock(ok=True)
    report.to_dict.return_value = {"criteria": [{"name": "stone-duality", "passed": True}]}
    mocked = mocker.patch("obstructa.tools.workbench._run_selftest", return_value=report)

    result = await run_selftest(threads=2)

    assert result["success"] is True
    assert result["criteria"][0]["name"] == "stone-duality"
    mocked.assert_called_once_with(2)
