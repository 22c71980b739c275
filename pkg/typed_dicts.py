"""
TypedDict для JSON-отчётов команд.

Каждый отчёт — конверт {command, config, results, warnings} и, при ошибке, error.
"""

from typing import Any, Dict, List, Optional, TypedDict

from config_package.constants import SimulationModeLiteral

# ===== Envelope =====


class ErrorPayload(TypedDict):
    """Описание ошибки в конверте."""

    type: str
    message: str
    module: str
    context: Dict[str, Any]


class Envelope(TypedDict, total=False):
    """Конверт отчёта любой команды."""

    command: str
    config: Dict[str, Any]
    results: Optional[Dict[str, Any]]
    warnings: List[str]
    error: ErrorPayload


# ===== simulate =====


class TrajectoryFiles(TypedDict):
    """Файлы одной траектории."""

    csv: str
    events: Optional[str]


class SimulateResult(TypedDict, total=False):
    """Результат команды simulate."""

    mode: SimulationModeLiteral
    branches: int
    forks: int
    files: List[TrajectoryFiles]
    summaries: List[Dict[str, Any]]
    manifest: Optional[str]
    sweep: List[Dict[str, Any]]


# ===== orbits =====


class BranchSummary(TypedDict):
    """Сводка семейства орбит."""

    label: Optional[str]
    points: int
    gamma_min: float
    gamma_max: float
    terminations: Dict[str, str]
    fold_gammas: List[float]
    segments: Dict[str, int]


class OrbitsResult(TypedDict, total=False):
    """Результат команды orbits."""

    branches: List[BranchSummary]
    branch_csv: str
    orbits: List[Dict[str, Any]]
    orbit_files: List[str]
    coexisting: List[Dict[str, Any]]
    grid: List[Dict[str, Any]]


# ===== analyze =====


class AnalyzeResult(TypedDict, total=False):
    """Результат команды analyze: по ключу на каждую запрошенную проверку."""

    folded_singularities: List[Dict[str, Any]]
    gamma_bound: Dict[str, float]
    singular_canards: List[Dict[str, Any]]
    maximal_canards: List[Dict[str, Any]]
    sticking_cycle: Dict[str, Any]
    closeness: Dict[str, Any]
    transversality: List[Dict[str, Any]]
    explosion: Dict[str, Any]
    phi: Dict[str, Any]
