"""MCP tool implementations for the obstructa server."""
