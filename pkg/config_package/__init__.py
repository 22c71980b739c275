"""
Конфигурация stiction-lab.

Модуль содержит:
- Settings: Pydantic-модель для валидации .env
- Constants: Константы приложения (Enum)
- JSON utils: Утилиты для работы с JSON файлами
- Logging: настройка логирования
"""

from .settings import settings, Settings, get_settings, reload_settings
from .constants import (
    RegionLabel,
    SingularSet,
    FieldBranch,
    TangencyKind,
    TangencyLabel,
    SlidingKind,
    StickingLeaf,
    EventKind,
    BranchPolicy,
    PhiShape,
    CriticalBranch,
    CriticalPointClass,
    CanardKind,
    FloquetClass,
    BranchLabel,
    TerminationReason,
    SimulationMode,
    SimulationModeLiteral,
)
from .json_utils import (
    safe_read_json,
    safe_write_json,
    write_json_lines,
    dumps_envelope,
)
from .logging_config import setup_logging

__all__ = [
    "settings",
    "Settings",
    "get_settings",
    "reload_settings",
    "RegionLabel",
    "SingularSet",
    "FieldBranch",
    "TangencyKind",
    "TangencyLabel",
    "SlidingKind",
    "StickingLeaf",
    "EventKind",
    "BranchPolicy",
    "PhiShape",
    "CriticalBranch",
    "CriticalPointClass",
    "CanardKind",
    "FloquetClass",
    "BranchLabel",
    "TerminationReason",
    "SimulationMode",
    "SimulationModeLiteral",
    "safe_read_json",
    "safe_write_json",
    "write_json_lines",
    "dumps_envelope",
    "setup_logging",
]
