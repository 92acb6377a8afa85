"""RunHistory - SQLite log of pipeline runs.

Each run_pipeline call served by the MCP server is recorded with:
- the input source and the sha256 digest of its canonical JSON
- the spectrum functor used
- the coloring count and the initial-locale flag
- the outcome status and the full JSON report
"""

import json
import aiosqlite
from pathlib import Path
from datetime import datetime
from typing import Optional, List, Dict, Any, Union
from enum import Enum
from dataclasses import dataclass


class RunStatus(str, Enum):
    """Pipeline run outcome."""
    PASSED = "passed"
    VIOLATION = "violation"
    INVALID = "invalid"


@dataclass
class RunRecord:
    """A single recorded pipeline run."""
    id: int
    timestamp: datetime
    source: str
    digest: str
    functor: str
    status: RunStatus
    colorings: Optional[int] = None
    initial: Optional[bool] = None
    report: Optional[Dict[str, Any]] = None
    error_message: Optional[str] = None


class RunHistory:
    """Manages the SQLite database of pipeline runs.

    Attributes:
        db_path: Path to SQLite database file
    """

    def __init__(self, db_path: Union[str, Path]):
        self.db_path = Path(db_path)
        self._db: Optional[aiosqlite.Connection] = None

    async def initialize(self):
        """Open the database and create the schema if needed."""
        if self._db is None:
            self._db = await aiosqlite.connect(str(self.db_path))

        await self._db.execute("""
            CREATE TABLE IF NOT EXISTS pipeline_runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                timestamp TEXT NOT NULL,
                source TEXT NOT NULL,
                digest TEXT NOT NULL,
                functor TEXT NOT NULL,
                status TEXT NOT NULL,
                colorings INTEGER,
                initial INTEGER,
                report TEXT,
                error_message TEXT
            )
        """)
        await self._db.execute("""
            CREATE INDEX IF NOT EXISTS idx_runs_status
            ON pipeline_runs(status)
        """)
        await self._db.execute("""
            CREATE INDEX IF NOT EXISTS idx_runs_digest
            ON pipeline_runs(digest)
        """)
        await self._db.execute("""
            CREATE INDEX IF NOT EXISTS idx_runs_timestamp
            ON pipeline_runs(timestamp)
        """)

        await self._db.commit()

    async def close(self):
        """Close database connection."""
        if self._db:
            await self._db.close()
            self._db = None

    async def add_record(
        self,
        source: str,
        digest: str,
        functor: str,
        status: RunStatus,
        colorings: Optional[int] = None,
        initial: Optional[bool] = None,
        report: Optional[Dict[str, Any]] = None,
        error_message: Optional[str] = None
    ) -> int:
        """Record one pipeline run.

        Args:
            source: Dataset name or file path the complex came from
            digest: sha256 of the canonical complex JSON
            functor: Spectrum functor tag
            status: Run outcome
            colorings: Coloring count (None if the run did not get that far)
            initial: Whether the limit locale was initial
            report: Full JSON report
            error_message: Diagnostic for failed runs

        Returns:
            ID of inserted record
        """
        timestamp = datetime.now().isoformat()
        report_json = json.dumps(report, sort_keys=True) if report else None

        cursor = await self._db.execute("""
            INSERT INTO pipeline_runs
            (timestamp, source, digest, functor, status, colorings,
             initial, report, error_message)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
        """, (
            timestamp,
            source,
            digest,
            functor,
            status.value,
            colorings,
            None if initial is None else int(initial),
            report_json,
            error_message
        ))

        await self._db.commit()
        return cursor.lastrowid

    async def get_record(self, record_id: int) -> Optional[RunRecord]:
        cursor = await self._db.execute("""
            SELECT * FROM pipeline_runs WHERE id = ?
        """, (record_id,))

        row = await cursor.fetchone()
        if not row:
            return None

        return self._row_to_record(row)

    async def query_records(
        self,
        status: Optional[RunStatus] = None,
        functor: Optional[str] = None,
        source: Optional[str] = None,
        digest: Optional[str] = None
    ) -> List[RunRecord]:
        """Query runs with filters, newest first.

        Args:
            status: Filter by outcome
            functor: Filter by spectrum functor tag
            source: Filter by dataset name or path
            digest: Filter by input digest
        """
        conditions = []
        values = []

        if status is not None:
            conditions.append("status = ?")
            values.append(status.value)

        if functor is not None:
            conditions.append("functor = ?")
            values.append(functor)

        if source is not None:
            conditions.append("source = ?")
            values.append(source)

        if digest is not None:
            conditions.append("digest = ?")
            values.append(digest)

        query = "SELECT * FROM pipeline_runs"
        if conditions:
            query += " WHERE " + " AND ".join(conditions)
        query += " ORDER BY timestamp DESC, id DESC"

        cursor = await self._db.execute(query, values)
        rows = await cursor.fetchall()
        return [self._row_to_record(row) for row in rows]

    async def get_recent_records(self, limit: int = 10) -> List[RunRecord]:
        cursor = await self._db.execute("""
            SELECT * FROM pipeline_runs
            ORDER BY timestamp DESC, id DESC
            LIMIT ?
        """, (limit,))

        rows = await cursor.fetchall()
        return [self._row_to_record(row) for row in rows]

    async def get_statistics(self) -> Dict[str, int]:
        """Count runs per status.

        Returns:
            Dictionary with total, passed, violation and invalid counts
        """
        cursor = await self._db.execute("""
            SELECT status, COUNT(*) as count
            FROM pipeline_runs
            GROUP BY status
        """)

        rows = await cursor.fetchall()

        stats = {"total": 0}
        stats.update({s.value: 0 for s in RunStatus})

        for status, count in rows:
            stats["total"] += count
            stats[status] = count

        return stats

    async def purge(self) -> int:
        """Delete every recorded run. Returns the number removed."""
        cursor = await self._db.execute("DELETE FROM pipeline_runs")
        await self._db.commit()
        return cursor.rowcount

    def _row_to_record(self, row) -> RunRecord:
        report = json.loads(row[8]) if row[8] else None

        return RunRecord(
            id=row[0],
            timestamp=datetime.fromisoformat(row[1]),
            source=row[2],
            digest=row[3],
            functor=row[4],
            status=RunStatus(row[5]),
            colorings=row[6],
            initial=None if row[7] is None else bool(row[7]),
            report=report,
            error_message=row[9]
        )
