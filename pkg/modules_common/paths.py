# modules_common/paths.py
"""
Каталоги и имена артефактов расчётов.
"""
from __future__ import annotations

import logging
import os
import tempfile
from typing import Optional

from dotenv import load_dotenv

log = logging.getLogger("stiction-lab.paths")

# ── Корень репозитория ───────────────────────────────────────────────────────
BASE_DIR = os.path.abspath(os.path.dirname(os.path.dirname(__file__)))

# .env нужен и воркерам пула, запущенным через spawn
load_dotenv(os.path.join(BASE_DIR, ".env"))

DEFAULT_RUNS_DIR = os.path.join(BASE_DIR, "runs")


def _usable(path: str) -> bool:
    """Каталог существует (или создан) и доступен на запись."""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        log.warning(f"Cannot create runs dir {path}: {e}")
        return False
    return os.access(path, os.W_OK | os.X_OK)


def resolve_runs_dir(preferred: Optional[str] = None) -> str:
    """
    Каталог результатов команды.

    Порядок: preferred (флаг --out или RUNS_DIR), затем <repo>/runs,
    затем временный каталог stiction-lab-runs.
    """
    for candidate in (preferred, DEFAULT_RUNS_DIR):
        if candidate and _usable(candidate):
            return os.path.abspath(candidate)

    fallback = os.path.join(tempfile.gettempdir(), "stiction-lab-runs")
    os.makedirs(fallback, exist_ok=True)
    log.warning(f"Falling back to {fallback} for run artifacts")
    return fallback


def run_file(out_dir: str, command: str, name: str, ext: str) -> str:
    """Путь к артефакту команды: <out_dir>/<command>_<name>.<ext>."""
    safe = name.replace(os.sep, "_").replace(" ", "_")
    return os.path.join(out_dir, f"{command}_{safe}.{ext.lstrip('.')}")


def shard_dir(out_dir: str, command: str) -> str:
    """Каталог шардов воркеров для команды."""
    path = os.path.join(out_dir, f".{command}_shards")
    os.makedirs(path, exist_ok=True)
    return path


__all__ = [
    "BASE_DIR",
    "DEFAULT_RUNS_DIR",
    "resolve_runs_dir",
    "run_file",
    "shard_dir",
]
