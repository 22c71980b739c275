"""
Пакет команд CLI: каждая команда регистрирует свой подпарсер.
"""

from . import analyze, orbits, simulate
from .errors import handle_cli_error
from .run_config import RunConfig, build_run_config

COMMANDS = (simulate, orbits, analyze)

__all__ = [
    "COMMANDS",
    "RunConfig",
    "build_run_config",
    "handle_cli_error",
]
