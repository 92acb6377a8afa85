"""MCP tools over the pipeline run history."""

from typing import Any, Dict, Optional

from obstructa.history import RunHistory, RunRecord, RunStatus


def _record_dict(record: RunRecord, include_report: bool = False) -> Dict[str, Any]:
    row = {
        "id": record.id,
        "timestamp": record.timestamp.isoformat(),
        "source": record.source,
        "digest": record.digest,
        "functor": record.functor,
        "status": record.status.value,
        "colorings": record.colorings,
        "initial": record.initial,
    }
    if record.error_message:
        row["error"] = record.error_message
    if include_report:
        row["report"] = record.report
    return row


async def get_run_history(
    history: RunHistory,
    status: Optional[str] = None,
    functor: Optional[str] = None,
    source: Optional[str] = None,
    limit: int = 20,
    include_reports: bool = False,
) -> Dict[str, Any]:
    """Query recorded pipeline runs, newest first.

    Args:
        history: Run log
        status: Filter by 'passed', 'violation' or 'invalid'
        functor: Filter by spectrum functor tag
        source: Filter by dataset name or path
        limit: Maximum number of runs to return
        include_reports: Attach the stored JSON reports

    Returns:
        Dictionary with success status and the matching runs
    """
    try:
        status_filter = RunStatus(status) if status else None
    except ValueError:
        return {"success": False, "error": f"status must be one of {[s.value for s in RunStatus]}"}

    if status_filter is None and functor is None and source is None:
        records = await history.get_recent_records(limit)
    else:
        records = (await history.query_records(status=status_filter, functor=functor, source=source))[:limit]

    return {
        "success": True,
        "runs": [_record_dict(r, include_reports) for r in records],
        "count": len(records),
    }


async def get_run_statistics(history: RunHistory) -> Dict[str, Any]:
    """Run counts per status."""
    return {"success": True, "statistics": await history.get_statistics()}
