"""obstructa MCP Server - Main entry point."""

import logging
from contextlib import asynccontextmanager
from typing import Optional

from mcp.server import FastMCP

from obstructa import config
from obstructa.history import RunHistory
from obstructa.safety import validate_operation, get_safety_metadata, TOOL_SAFETY_MAP
from obstructa.tools import runs, workbench


# Load configuration before anything else
config_path = config.load_config()

config.configure_logging(default_level="INFO")
logger = logging.getLogger(__name__)

if config_path:
    logger.info(f"Loaded configuration from: {config_path}")
else:
    logger.info("No .env file found. Using environment variables only.")


# Global instances (initialized in lifespan)
history: Optional[RunHistory] = None
threads: int = 1


@asynccontextmanager
async def lifespan(mcp: FastMCP):
    """Lifespan context manager for startup and shutdown."""
    global history, threads

    logger.info("Starting obstructa MCP Server...")

    threads = config.get_threads()
    db_path = config.get_history_db_path()
    logger.info(f"Opening run history at {db_path}...")
    history = RunHistory(db_path)
    await history.initialize()

    logger.info(f"obstructa MCP Server started ({threads} solver threads)")

    yield

    logger.info("Shutting down obstructa MCP Server...")
    if history:
        await history.close()
    logger.info("obstructa MCP Server shutdown complete.")


mcp = FastMCP(
    "obstructa",
    lifespan=lifespan
)


def validate_tool_safety(tool_name: str) -> None:
    """
    Validate that a tool operation is allowed to execute.

    Raises:
        ValueError: If operation is blocked
    """
    allowed, reason = validate_operation(tool_name)
    if not allowed:
        raise ValueError(reason)


def add_safety_metadata(result: dict, tool_name: str) -> dict:
    """
    Add safety metadata to tool result.

    Args:
        result: Original tool result
        tool_name: Name of the tool that was called

    Returns:
        Result with added safety metadata
    """
    safety_info = get_safety_metadata(tool_name)

    if isinstance(result, dict):
        result["_safety"] = safety_info

    return result


# =============================================================================
# Workbench Tools
# =============================================================================

@mcp.tool()
async def list_datasets() -> dict:
    """List the bundled frame-complex configurations."""
    validate_tool_safety("list_datasets")
    return add_safety_metadata(await workbench.list_datasets(), "list_datasets")


@mcp.tool()
async def validate_configuration(source: str) -> dict:
    """Parse a configuration and check its bases exactly.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
    """
    validate_tool_safety("validate_configuration")
    result = await workbench.validate_configuration(source)
    return add_safety_metadata(result, "validate_configuration")


@mcp.tool()
async def paste_configuration(source: str) -> dict:
    """Paste the bases of a configuration into a partial Boolean algebra and report its size.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
    """
    validate_tool_safety("paste_configuration")
    result = await workbench.paste_configuration(source)
    return add_safety_metadata(result, "paste_configuration")


@mcp.tool()
async def color_configuration(source: str, mode: str = "count") -> dict:
    """Search 2-colorings of a configuration.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        mode: 'find', 'count' or 'enumerate' (default: count)
    """
    validate_tool_safety("color_configuration")
    result = await workbench.color_configuration(source, mode=mode, threads=threads)
    return add_safety_metadata(result, "color_configuration")


@mcp.tool()
async def export_dimacs(source: str, output_path: str) -> dict:
    """Write the coloring CNF of a configuration as a DIMACS file.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        output_path: File to write
    """
    validate_tool_safety("export_dimacs")
    result = await workbench.export_dimacs(source, output_path)
    return add_safety_metadata(result, "export_dimacs")


@mcp.tool()
async def boolean_colimit_of_configuration(source: str) -> dict:
    """Colimit of the total Boolean subalgebras of a pasted configuration.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
    """
    validate_tool_safety("boolean_colimit_of_configuration")
    result = await workbench.boolean_colimit_of_configuration(source, threads=threads)
    return add_safety_metadata(result, "boolean_colimit_of_configuration")


@mcp.tool()
async def spectrum_limit(source: str, functor: str = "gelfand") -> dict:
    """Limit locale of a spectrum functor over the configuration's subalgebra diagram.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        functor: 'gelfand', 'zariski', 'stone' or 'pierce' (default: gelfand)
    """
    validate_tool_safety("spectrum_limit")
    result = await workbench.spectrum_limit(source, functor=functor)
    return add_safety_metadata(result, "spectrum_limit")


@mcp.tool()
async def run_pipeline(source: str, functor: str = "gelfand") -> dict:
    """Run the full no-go pipeline on a configuration and record it in run history.

    Args:
        source: Path to a configuration JSON file, or a bundled dataset name
        functor: 'gelfand', 'zariski', 'stone' or 'pierce' (default: gelfand)
    """
    validate_tool_safety("run_pipeline")
    result = await workbench.run_pipeline(source, functor=functor, threads=threads, history=history)
    return add_safety_metadata(result, "run_pipeline")


@mcp.tool()
async def run_selftest() -> dict:
    """Run the full invariant suite."""
    validate_tool_safety("run_selftest")
    return add_safety_metadata(await workbench.run_selftest(threads=threads), "run_selftest")


# =============================================================================
# Run History Tools
# =============================================================================

@mcp.tool()
async def get_run_history(
    status: Optional[str] = None,
    functor: Optional[str] = None,
    source: Optional[str] = None,
    limit: int = 20,
    include_reports: bool = False,
) -> dict:
    """Query recorded pipeline runs, newest first.

    Args:
        status: Filter by 'passed', 'violation' or 'invalid' (optional)
        functor: Filter by spectrum functor (optional)
        source: Filter by dataset name or path (optional)
        limit: Maximum number of runs (default: 20)
        include_reports: Attach the stored JSON reports (default: False)
    """
    validate_tool_safety("get_run_history")
    result = await runs.get_run_history(
        history, status=status, functor=functor, source=source,
        limit=limit, include_reports=include_reports,
    )
    return add_safety_metadata(result, "get_run_history")


@mcp.tool()
async def get_run_statistics() -> dict:
    """Run counts per status."""
    validate_tool_safety("get_run_statistics")
    return add_safety_metadata(await runs.get_run_statistics(history), "get_run_statistics")


@mcp.tool()
async def purge_run_history() -> dict:
    """Delete all recorded runs (always blocked)."""
    validate_tool_safety("purge_run_history")
    return {"success": True, "deleted": await history.purge()}


def main():
    """Main entry point."""
    logger.info("obstructa MCP Server starting...")
    logger.info(f"Safety validation enabled for all {len(TOOL_SAFETY_MAP)} tools")
    mcp.run()


if __name__ == "__main__":
    main()
