"""Tests for RunHistory - SQLite log of pipeline runs."""

import pytest

from obstructa.history import RunHistory, RunRecord, RunStatus


class TestRunHistoryInitialization:
    """Test RunHistory initialization."""

    @pytest.mark.asyncio
    async def test_initialize_creates_database(self, temp_dir):
        """Should create database file and initialize schema."""
        db_path = temp_dir / "runs.db"
        history = RunHistory(db_path)

        await history.initialize()

        assert db_path.exists()
        assert await history.get_recent_records() == []
        await history.close()

    @pytest.mark.asyncio
    async def test_initialize_idempotent(self, temp_dir):
        """Should be safe to call initialize multiple times."""
        history = RunHistory(temp_dir / "runs.db")

        await history.initialize()
        await history.initialize()

        assert (await history.get_statistics())["total"] == 0
        await history.close()

    @pytest.mark.asyncio
    async def test_close_twice(self, temp_dir):
        history = RunHistory(str(temp_dir / "runs.db"))
        await history.initialize()
        await history.close()
        await history.close()


class TestAddRecord:
    """Test recording pipeline runs."""

    @pytest.mark.asyncio
    async def test_add_record_with_all_fields(self, run_history):
        """Should round-trip every field, including the JSON report."""
        report = {"colorings": 5, "initial": False, "checks": [{"name": "cnf-models", "passed": True}]}

        record_id = await run_history.add_record(
            source="shared_ray_d3",
            digest="ab" * 32,
            functor="gelfand",
            status=RunStatus.PASSED,
            colorings=5,
            initial=False,
            report=report,
        )

        record = await run_history.get_record(record_id)
        assert isinstance(record, RunRecord)
        assert record.source == "shared_ray_d3"
        assert record.functor == "gelfand"
        assert record.status == RunStatus.PASSED
        assert record.colorings == 5
        assert record.initial is False
        assert record.report == report
        assert record.error_message is None

    @pytest.mark.asyncio
    async def test_add_record_minimal_fields(self, run_history):
        """Invalid inputs are recorded without counts."""
        record_id = await run_history.add_record(
            source="broken.json",
            digest="",
            functor="gelfand",
            status=RunStatus.INVALID,
            error_message="Invalid frame complex: orthogonality at (0, 1)",
        )

        record = await run_history.get_record(record_id)
        assert record.status == RunStatus.INVALID
        assert record.colorings is None
        assert record.initial is None
        assert record.report is None
        assert "orthogonality" in record.error_message

    @pytest.mark.asyncio
    async def test_get_missing_record(self, run_history):
        assert await run_history.get_record(999) is None


class TestQueries:
    """Test filtered and recent queries."""

    @pytest.fixture
    async def populated(self, run_history):
        await run_history.add_record("single_basis_d3", "d1", "gelfand", RunStatus.PASSED, 3, False)
        await run_history.add_record("peres24_d4", "d2", "stone", RunStatus.PASSED, 0, True)
        await run_history.add_record("peres24_d4", "d2", "gelfand", RunStatus.VIOLATION)
        return run_history

    @pytest.mark.asyncio
    async def test_filter_by_status(self, populated):
        records = await populated.query_records(status=RunStatus.PASSED)
        assert {r.source for r in records} == {"single_basis_d3", "peres24_d4"}

    @pytest.mark.asyncio
    async def test_filter_combination(self, populated):
        records = await populated.query_records(functor="gelfand", digest="d2")
        assert len(records) == 1
        assert records[0].status == RunStatus.VIOLATION

    @pytest.mark.asyncio
    async def test_filter_by_source(self, populated):
        assert len(await populated.query_records(source="peres24_d4")) == 2
        assert await populated.query_records(source="nothing") == []

    @pytest.mark.asyncio
    async def test_recent_is_newest_first(self, populated):
        recent = await populated.get_recent_records(limit=2)
        assert len(recent) == 2
        assert recent[0].id > recent[1].id

    @pytest.mark.asyncio
    async def test_statistics(self, populated):
        stats = await populated.get_statistics()
        assert stats == {"total": 3, "passed": 2, "violation": 1, "invalid": 0}

    @pytest.mark.asyncio
    async def test_purge(self, populated):
        assert await populated.purge() == 3
        assert (await populated.get_statistics())["total"] == 0
