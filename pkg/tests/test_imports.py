import os
import sys

import pytest

# Ensure repo root is in path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))


def test_cli_import():
    """Checks if cli.py can be imported (no syntax errors or missing deps)."""
    try:
        import cli

        cli.build_parser()
    except ImportError as e:
        pytest.fail(f"Failed to import cli: {e}")
    except Exception as e:
        pytest.fail(f"Failed to load cli module: {e}")


def test_routers_import():
    """Checks if all command routers can be imported."""
    try:
        from routers import analyze, orbits, simulate  # noqa: F401
    except ImportError as e:
        pytest.fail(f"Failed to import routers: {e}")


def test_library_import():
    """Checks if the library packages can be imported without the CLI."""
    try:
        import modules_model.services  # noqa: F401
        import modules_orbits.diagnostics  # noqa: F401
        import modules_pws.integrator  # noqa: F401
        import modules_regularization.stiff  # noqa: F401
    except ImportError as e:
        pytest.fail(f"Failed to import library modules: {e}")
