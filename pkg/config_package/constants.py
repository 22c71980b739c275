"""
Константы приложения.

Содержит Enum для безопасного использования строковых меток (области фазового
пространства, типы событий, политики ветвления, классы особых точек и т.д.).
"""

from enum import Enum
from typing import Literal


class RegionLabel(str, Enum):
    """Страты фазового пространства (x, y, θ)."""

    G_PLUS = "g_plus"
    G_MINUS = "g_minus"
    SIGMA_C_PLUS = "sigma_c_plus"
    SIGMA_C_MINUS = "sigma_c_minus"
    SIGMA_S = "sigma_s"
    BOUNDARY_C_PLUS = "boundary_c_plus"
    BOUNDARY_C_MINUS = "boundary_c_minus"

    @property
    def title(self) -> str:
        """Человеческое название области."""
        titles = {
            "g_plus": "Скольжение вперёд (y > 0)",
            "g_minus": "Скольжение назад (y < 0)",
            "sigma_c_plus": "Область пересечения вверх",
            "sigma_c_minus": "Область пересечения вниз",
            "sigma_s": "Область залипания",
            "boundary_c_plus": "Граница залипания (ξ = −μ_s)",
            "boundary_c_minus": "Граница залипания (ξ = μ_s)",
        }
        return titles.get(self.value, self.value)

    @property
    def on_switching_manifold(self) -> bool:
        """True для всех областей на y = 0."""
        return self not in (RegionLabel.G_PLUS, RegionLabel.G_MINUS)


class SingularSet(str, Enum):
    """Линии прямой неединственности I±."""

    I_PLUS = "i_plus"
    I_MINUS = "i_minus"


class FieldBranch(str, Enum):
    """Гладкие векторные поля кусочно-гладкой системы."""

    PLUS = "plus"
    MINUS = "minus"
    STICK = "stick"

    @property
    def sigma(self) -> int:
        """Знак скорости на дуге скольжения (0 для залипания)."""
        return {"plus": 1, "minus": -1, "stick": 0}[self.value]

    @classmethod
    def from_sigma(cls, sigma: int) -> "FieldBranch":
        """Поле скольжения по знаку скорости."""
        return cls.PLUS if sigma > 0 else cls.MINUS


class TangencyKind(str, Enum):
    """Пара (векторное поле, множество), для которой ищется касание."""

    ZS_ON_BOUNDARY_C_PLUS = "zs_on_boundary_c_plus"
    ZS_ON_BOUNDARY_C_MINUS = "zs_on_boundary_c_minus"
    Z_PLUS_ON_SIGMA = "z_plus_on_sigma"
    Z_MINUS_ON_SIGMA = "z_minus_on_sigma"


class TangencyLabel(str, Enum):
    """Тип касания векторного поля и многообразия."""

    VISIBLE = "visible"
    INVISIBLE = "invisible"
    CUSP = "cusp"
    NONE = "none"

    @property
    def title(self) -> str:
        titles = {
            "visible": "Видимое касание",
            "invisible": "Невидимое касание",
            "cusp": "Касание-клюв",
            "none": "Нет касания",
        }
        return titles.get(self.value, self.value)


class SlidingKind(str, Enum):
    """Сравнение классического скольжения Филиппова и залипания."""

    CROSSING = "crossing"
    FILIPPOV_SLIDING = "filippov_sliding"
    STICTION_ONLY_SLIDING = "stiction_only_sliding"
    DEGENERATE = "degenerate"


class StickingLeaf(str, Enum):
    """Лист залипания {x = const}: целиком внутри Σ_s или с выходом из него."""

    PERIODIC = "periodic"
    ESCAPING = "escaping"

    @property
    def title(self) -> str:
        titles = {
            "periodic": "Периодическое залипание",
            "escaping": "Залипание со срывом",
        }
        return titles.get(self.value, self.value)


class EventKind(str, Enum):
    """События событийного интегратора."""

    SLIP_TO_STICK_LANDING = "slip_to_stick_landing"
    STICK_TO_SLIP_ONSET = "stick_to_slip_onset"
    CROSSING_UP = "crossing_up"
    CROSSING_DOWN = "crossing_down"
    SINGULAR_HIT = "singular_hit"
    TANGENCY_GRAZE = "tangency_graze"
    UNDEFINED_FRICTION_HIT = "undefined_friction_hit"

    @property
    def title(self) -> str:
        titles = {
            "slip_to_stick_landing": "Переход в залипание",
            "stick_to_slip_onset": "Срыв в скольжение",
            "crossing_up": "Пересечение y = 0 вверх",
            "crossing_down": "Пересечение y = 0 вниз",
            "singular_hit": "Попадание на I±",
            "tangency_graze": "Касание y = 0",
            "undefined_friction_hit": "Неопределённое трение",
        }
        return titles.get(self.value, self.value)


class BranchPolicy(str, Enum):
    """Политика выбора продолжения в точках неединственности."""

    STICK_FIRST = "stick_first"
    SLIP_FIRST = "slip_first"
    ENUMERATE_BOTH = "enumerate_both"

    @classmethod
    def from_cli(cls, value: str) -> "BranchPolicy":
        """Разбор короткого имени из командной строки (stick/slip/enumerate)."""
        aliases = {
            "stick": cls.STICK_FIRST,
            "slip": cls.SLIP_FIRST,
            "enumerate": cls.ENUMERATE_BOTH,
        }
        v = value.strip().lower()
        if v in aliases:
            return aliases[v]
        return cls(v)


class PhiShape(str, Enum):
    """Форма функции регуляризации."""

    STICTION = "stiction"
    # монотонная (Сотомайор–Тейшейра), только как отрицательный контроль
    MONOTONE = "monotone"


class CriticalBranch(str, Enum):
    """Ветви критического многообразия."""

    C_A = "c_a"
    C_R_PLUS = "c_r_plus"
    C_R_MINUS = "c_r_minus"

    @property
    def attracting(self) -> bool:
        return self is CriticalBranch.C_A


class CriticalPointClass(str, Enum):
    """Классы свёрнутых особенностей."""

    FOLDED_SADDLE = "folded_saddle"
    FOLDED_CENTER = "folded_center"
    FOLDED_FOCUS_STABLE = "folded_focus_stable"
    FOLDED_NODE_STABLE = "folded_node_stable"


class CanardKind(str, Enum):
    """Типы уток."""

    SINGULAR_VRAI = "singular_vrai"
    SINGULAR_FAUX = "singular_faux"
    MAXIMAL_FORWARD = "maximal_forward"
    MAXIMAL_BACKWARD = "maximal_backward"


class FloquetClass(str, Enum):
    """Устойчивость периодической орбиты по мультипликаторам."""

    ATTRACTING = "attracting"
    SADDLE = "saddle"
    REPELLING = "repelling"
    DEGENERATE = "degenerate"


class BranchLabel(str, Enum):
    """Метки семейств периодических орбит."""

    PI0_LEFT = "pi0_left"
    PI0_RIGHT = "pi0_right"
    PIEPS_LEFT = "pieps_left"
    PIEPS_CENTER = "pieps_center"
    PIEPS_RIGHT = "pieps_right"


class TerminationReason(str, Enum):
    """Причины остановки продолжения по параметру."""

    REACHED_END = "reached_end"
    PURE_SLIP = "pure_slip"
    TANGENCY = "tangency"
    RESONANCE = "resonance"
    THETA_STAR_PI = "theta_star_pi"
    INADMISSIBLE = "inadmissible"
    STEP_UNDERFLOW = "step_underflow"
    MAX_STEPS = "max_steps"

    @property
    def title(self) -> str:
        titles = {
            "reached_end": "Достигнут конец диапазона",
            "pure_slip": "Чистое скольжение (θ* → 0)",
            "tangency": "Видимое касание (θ0 → π/2)",
            "resonance": "Резонанс γ = 1",
            "theta_star_pi": "Жёсткое тело (θ* → π)",
            "inadmissible": "Недопустимое решение",
            "step_underflow": "Шаг стал слишком мал",
            "max_steps": "Превышено число шагов",
        }
        return titles.get(self.value, self.value)


class SimulationMode(str, Enum):
    """Режимы команды simulate."""

    PWS = "pws"
    REG = "reg"


# Literal типы для type hints
SimulationModeLiteral = Literal["pws", "reg"]
