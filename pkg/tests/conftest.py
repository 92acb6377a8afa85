"""Shared pytest fixtures for obstructa tests."""

import json
import shutil
import tempfile
from pathlib import Path
from typing import Any, Dict

import pytest

from obstructa.complexes import FrameComplex, complex_from_json, load_complex
from obstructa.history import RunHistory


# =============================================================================
# Bundled Dataset Fixtures
# =============================================================================

@pytest.fixture
def single_basis() -> FrameComplex:
    """One orthonormal basis of Q^3: 3 colorings."""
    return load_complex("single_basis_d3")


@pytest.fixture
def shared_ray() -> FrameComplex:
    """Two bases of Q^3 sharing e1: 5 colorings."""
    return load_complex("shared_ray_d3")


@pytest.fixture
def peres24() -> FrameComplex:
    """Uncolorable 24-ray configuration in dimension 4."""
    return load_complex("peres24_d4")


@pytest.fixture
def peres33() -> FrameComplex:
    """Uncolorable configuration in dimension 3 over Q(sqrt2)."""
    return load_complex("peres33_completed_d3")


# =============================================================================
# Small Configuration Fixtures
# =============================================================================

@pytest.fixture
def shared_ray_json() -> Dict[str, Any]:
    return {
        "dimension": 3,
        "field": "Q",
        "rays": [
            ["1", "0", "0"],
            ["0", "1", "0"],
            ["0", "0", "1"],
            ["0", "1", "1"],
            ["0", "1", "-1"],
        ],
        "bases": [[0, 1, 2], [0, 3, 4]],
    }


@pytest.fixture
def two_disjoint_bases() -> FrameComplex:
    """Two bases of Q^2 with no common ray: 4 colorings."""
    return complex_from_json({
        "dimension": 2,
        "field": "Q",
        "rays": [["1", "0"], ["0", "1"], ["1", "1"], ["1", "-1"]],
        "bases": [[0, 1], [2, 3]],
    })


@pytest.fixture
def sqrt2_pair() -> FrameComplex:
    return load_complex("sqrt2_pair_d2")


@pytest.fixture
def config_file(temp_dir, shared_ray_json) -> Path:
    """The shared-ray configuration written to disk."""
    path = temp_dir / "shared_ray.json"
    path.write_text(json.dumps(shared_ray_json, indent=2))
    return path


# =============================================================================
# Temporary Directory Fixtures
# =============================================================================

@pytest.fixture
def temp_dir():
    """Create a temporary directory that is cleaned up after the test."""
    temp_path = tempfile.mkdtemp()
    yield Path(temp_path)
    shutil.rmtree(temp_path)


@pytest.fixture
async def run_history(temp_dir):
    """Initialized RunHistory on a temporary database."""
    history = RunHistory(temp_dir / "runs.db")
    await history.initialize()
    yield history
    await history.close()
