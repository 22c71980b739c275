# modules_common/errors.py
"""
Иерархия исключений stiction-lab.

Каждое исключение несёт код выхода CLI (2 — ошибка конфигурации,
3 — численный сбой) и словарь context с диагностикой для JSON-ответа.
"""
from __future__ import annotations

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class StictionError(Exception):
    """Базовая ошибка библиотеки."""

    exit_code: int = EXIT_NUMERICAL
    module: str = "stiction-lab"

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = dict(context or {})

    def to_payload(self) -> Dict[str, Any]:
        """Машиночитаемое описание ошибки."""
        return {
            "type": type(self).__name__,
            "message": self.message,
            "module": self.module,
            "context": self.context,
        }


class ConfigError(StictionError):
    """Неверная конфигурация или нарушенное предусловие на входе."""

    exit_code = EXIT_CONFIG
    module = "cli"


class NumericalError(StictionError):
    """Численный сбой при корректных входных данных."""

    exit_code = EXIT_NUMERICAL


# ── stiction_model ──────────────────────────────────────────────────────────


class UndefinedFrictionError(NumericalError):
    """Закон трения не определён при y = 0, |ξ| = μ_s."""

    module = "stiction_model"


class BranchNotApplicableError(ConfigError):
    """Векторное поле запрошено вне своей области (Z_s при y ≠ 0)."""

    module = "stiction_model"


class NotOnTangencySetError(ConfigError):
    """Точка не лежит на множестве, для которого классифицируется касание."""

    module = "stiction_model"


# ── pws_integrator ──────────────────────────────────────────────────────────


class ResonanceGuardError(NumericalError):
    """Замкнутая формула неприменима: |γ − 1| внутри защитной полосы."""

    module = "pws_integrator"


class NoEventWithinHorizonError(NumericalError):
    """Событие не найдено до горизонта T_max."""

    module = "pws_integrator"


class RootPolishError(NumericalError):
    """Уточнение корня события не сошлось."""

    module = "pws_integrator"


class BackwardTimeError(ConfigError):
    """Интегрирование в обратном времени не поддерживается."""

    module = "pws_integrator"


# ── regularization ──────────────────────────────────────────────────────────


class SingularSystemError(NumericalError):
    """Вырожденная линейная система для коэффициентов φ."""

    module = "regularization"


class ShapeViolationError(ConfigError):
    """φ не удовлетворяет условиям формы для заданного δ."""

    module = "regularization"


class SingularLineError(NumericalError):
    """Редуцированный поток вычислен на линии складки φ′(ŷ) = 0."""

    module = "regularization"


class NoSingularitiesError(NumericalError):
    """Свёрнутых особенностей нет (|Γδ| > 1)."""

    module = "regularization"


class NoStickError(ConfigError):
    """Периодического залипания нет при μ_s ≤ 1."""

    module = "regularization"


class StepFailureError(NumericalError):
    """Жёсткий интегратор не смог продвинуться."""

    module = "regularization"


class SingularSolutionError(NumericalError):
    """Сравнение с регуляризацией не определено для сингулярного решения."""

    module = "regularization"


# ── orbits ──────────────────────────────────────────────────────────────────


class NewtonDivergenceError(NumericalError):
    """Метод Ньютона не сошёлся."""

    module = "orbits"


class ClosureFailureError(NumericalError):
    """Собранная орбита не замыкается за период."""

    module = "orbits"


class DegenerateTransitionError(NumericalError):
    """Касательный переход: матрица скачка не определена."""

    module = "orbits"


class NoIntersectionError(NumericalError):
    """Образ отображения возврата не пересекает утку."""

    module = "orbits"


__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
    "StictionError",
    "ConfigError",
    "NumericalError",
    "UndefinedFrictionError",
    "BranchNotApplicableError",
    "NotOnTangencySetError",
    "ResonanceGuardError",
    "NoEventWithinHorizonError",
    "RootPolishError",
    "BackwardTimeError",
    "SingularSystemError",
    "ShapeViolationError",
    "SingularLineError",
    "NoSingularitiesError",
    "NoStickError",
    "StepFailureError",
    "SingularSolutionError",
    "NewtonDivergenceError",
    "ClosureFailureError",
    "DegenerateTransitionError",
    "NoIntersectionError",
]
