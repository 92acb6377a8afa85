"""MCP tools for the computational workbench.

Each tool loads a configuration (file path or bundled dataset name), runs one
workbench stage in a worker thread, and returns a JSON-ready dict with a
`success` flag. Configuration errors come back as `{"success": False, ...}`.
"""

import asyncio
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from obstructa import complexes
from obstructa.complexes import COLOR_MODES, ConfigurationError, FrameComplex
from obstructa.history import RunHistory, RunStatus
from obstructa.reports import PropertyViolation
from obstructa.selftest import run_selftest as _run_selftest
from obstructa.spectra import SpectrumFunctor, complex_boolean_colimit, complex_spectrum_limit, nogo_pipeline

logger = logging.getLogger(__name__)


def _error(e: Exception) -> Dict[str, Any]:
    result: Dict[str, Any] = {"success": False, "error": str(e), "error_type": type(e).__name__}
    for attr in ("line", "column", "pointer"):
        if hasattr(e, attr):
            result[attr] = getattr(e, attr)
    return result


def _load_valid(source: str) -> FrameComplex:
    c = complexes.load_complex(source)
    report = complexes.validate_complex(c)
    if not report.ok:
        raise ConfigurationError(f"Invalid frame complex: {report.law} at {report.witness}")
    return c


async def list_datasets() -> Dict[str, Any]:
    """List the bundled configurations.

    Returns:
        Dictionary with success status and, per dataset, its name,
        dimension, ray and basis counts and description
    """
    def _list():
        rows = []
        for name in complexes.list_datasets():
            c = complexes.load_complex(name)
            rows.append({
                "name": name,
                "dimension": c.dimension,
                "field": c.field,
                "rays": len(c.rays),
                "bases": len(c.bases),
                "description": c.description,
            })
        return rows

    try:
        datasets = await asyncio.to_thread(_list)
        return {"success": True, "datasets": datasets, "count": len(datasets)}
    except ConfigurationError as e:
        return _error(e)


async def validate_configuration(source: str) -> Dict[str, Any]:
    """Parse and exactly validate a frame complex.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name

    Returns:
        Dictionary with success status, `valid`, and the violated law and
        witness when invalid. Parse and schema errors set success False.
    """
    def _validate():
        c = complexes.load_complex(source)
        return c, complexes.validate_complex(c)

    try:
        c, report = await asyncio.to_thread(_validate)
    except ConfigurationError as e:
        return _error(e)
    return {
        "success": True,
        "valid": report.ok,
        "digest": c.digest(),
        "report": report.to_dict(),
    }


async def paste_configuration(source: str) -> Dict[str, Any]:
    """Paste the Boolean algebras of the bases into a partial Boolean algebra.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name

    Returns:
        Dictionary with success status, element and shared-subspace counts,
        and the number of maximal commeasurable blocks
    """
    def _paste():
        pasted = complexes.paste(_load_valid(source))
        stats = pasted.stats()
        stats["blocks"] = len(pasted.pba.blocks())
        return stats

    try:
        stats = await asyncio.to_thread(_paste)
        return {"success": True, "stats": stats}
    except ConfigurationError as e:
        return _error(e)


async def color_configuration(source: str, mode: str = "count", threads: int = 1) -> Dict[str, Any]:
    """Search 2-colorings (exactly one colored ray per basis).

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        mode: 'find', 'count' or 'enumerate'
        threads: Solver threads

    Returns:
        Dictionary with success status, count, colorings (find/enumerate)
        and search statistics

    Example:
        >>> result = await color_configuration("shared_ray_d3", mode="count")
        >>> result["count"]
        5
    """
    if mode not in COLOR_MODES:
        return {"success": False, "error": f"mode must be one of {list(COLOR_MODES)}"}
    try:
        c = await asyncio.to_thread(_load_valid, source)
        found = await asyncio.to_thread(complexes.color_search, c, mode, threads)
    except ConfigurationError as e:
        return _error(e)
    return {
        "success": True,
        "mode": mode,
        "count": found.count,
        "colorings": [list(col) for col in found.colorings],
        "nodes": found.nodes,
        "elapsed": round(found.elapsed, 3),
    }


async def export_dimacs(source: str, output_path: str) -> Dict[str, Any]:
    """Write the coloring CNF of a configuration in DIMACS format.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        output_path: File to write

    Returns:
        Dictionary with success status, the written path and variable and
        clause counts
    """
    def _export():
        c = _load_valid(source)
        presentation, _ = complexes.to_cnf(c)
        out = Path(output_path).expanduser()
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(complexes.to_dimacs(c), encoding="utf-8")
        return out, presentation

    try:
        out, presentation = await asyncio.to_thread(_export)
    except (ConfigurationError, OSError) as e:
        return _error(e)
    logger.info("Wrote DIMACS for %s to %s", source, out)
    return {
        "success": True,
        "path": str(out),
        "variables": len(presentation.vars),
        "clauses": len(presentation.clauses),
    }


async def boolean_colimit_of_configuration(source: str, threads: int = 1) -> Dict[str, Any]:
    """Colimit of the total Boolean subalgebras of the pasted configuration.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        threads: Model-enumeration threads

    Returns:
        Dictionary with success status, atom count, size (2^atoms) and
        whether the colimit is the terminal (one-element) algebra
    """
    try:
        c = await asyncio.to_thread(_load_valid, source)
        colimit = await asyncio.to_thread(complex_boolean_colimit, c, threads)
    except ConfigurationError as e:
        return _error(e)
    return {
        "success": True,
        "atoms": colimit.algebra.atom_count,
        "size": colimit.size,
        "terminal": colimit.size == 1,
    }


async def spectrum_limit(source: str, functor: str = "gelfand") -> Dict[str, Any]:
    """Limit in Loc of one spectrum functor over the subalgebra diagram.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        functor: 'gelfand', 'zariski', 'stone' or 'pierce'

    Returns:
        Dictionary with success status, limit opens, limit points and the
        initial-locale flag
    """
    try:
        tag = SpectrumFunctor(functor)
    except ValueError:
        return {"success": False, "error": f"functor must be one of {[f.value for f in SpectrumFunctor]}"}
    try:
        c = await asyncio.to_thread(_load_valid, source)
        limit = await asyncio.to_thread(complex_spectrum_limit, c, tag)
    except ConfigurationError as e:
        return _error(e)
    return {
        "success": True,
        "functor": tag.value,
        "limitOpens": limit.frame.size,
        "limitPoints": limit.point_count,
        "initial": limit.frame.size == 1,
    }


async def run_pipeline(
    source: str,
    functor: str = "gelfand",
    threads: int = 1,
    history: Optional[RunHistory] = None,
) -> Dict[str, Any]:
    """Run the full no-go pipeline and record the outcome.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        functor: 'gelfand', 'zariski', 'stone' or 'pierce'
        threads: Solver threads
        history: Run log to record into (optional)

    Returns:
        Dictionary with success status, the JSON report and the run record ID
    """
    try:
        tag = SpectrumFunctor(functor)
    except ValueError:
        return {"success": False, "error": f"functor must be one of {[f.value for f in SpectrumFunctor]}"}

    digest = ""
    try:
        c = await asyncio.to_thread(complexes.load_complex, source)
        digest = c.digest()
        report = await asyncio.to_thread(nogo_pipeline, c, tag, threads)
    except ConfigurationError as e:
        result = _error(e)
        status, payload = RunStatus.INVALID, None
    except PropertyViolation as e:
        result = _error(e)
        result["checks"] = [ch.to_dict() for ch in e.checks]
        status, payload = RunStatus.VIOLATION, {"checks": result["checks"]}
    else:
        payload = report.to_json_dict()
        result = {"success": True, "report": payload}
        status = RunStatus.PASSED

    if history is not None:
        result["record_id"] = await history.add_record(
            source=source,
            digest=digest,
            functor=tag.value,
            status=status,
            colorings=payload.get("colorings") if payload else None,
            initial=payload.get("initial") if payload else None,
            report=payload,
            error_message=result.get("error"),
        )
    return result


async def run_selftest(threads: int = 1) -> Dict[str, Any]:
    """Run the invariant suite (all acceptance criteria).

    Args:
        threads: Solver threads

    Returns:
        Dictionary with success status and one entry per criterion
    """
    report = await asyncio.to_thread(_run_selftest, threads)
    return {"success": report.ok, **report.to_dict()}
