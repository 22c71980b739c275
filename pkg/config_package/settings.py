"""
Настройки приложения (Pydantic Settings).

Содержит значения по умолчанию (параметры из таблицы моделирования: μ_s = 1.1,
μ_d = 0.4, ε = 1e-3, δ = 0.6), численные допуски и параметры вывода.
Все значения можно переопределить через переменные окружения или .env файл.
"""

import logging
import os
from typing import List, Optional

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    """Настройки приложения с валидацией."""

    model_config = SettingsConfigDict(
        env_file=os.path.join(os.path.dirname(__file__), "..", ".env"),
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False,
        populate_by_name=True,
    )

    # ===== Модель =====
    mu_s: float = Field(default=1.1, alias="MU_S", gt=0, description="Статическое трение")
    mu_d: float = Field(default=0.4, alias="MU_D", gt=0, description="Динамическое трение")
    gamma: float = Field(default=2.0, alias="GAMMA", gt=0, description="Отношение частот Ω/ω")

    # ===== Регуляризация =====
    eps: float = Field(default=1e-3, alias="EPS", gt=0, le=0.1)
    delta: float = Field(default=0.6, alias="DELTA", gt=0, lt=1)

    # ===== Допуски =====
    classify_tol: float = Field(default=1e-10, alias="CLASSIFY_TOL", gt=0)
    event_tol: float = Field(default=1e-12, alias="EVENT_TOL", gt=0)
    resonance_band: float = Field(default=1e-3, alias="RESONANCE_BAND", ge=0)
    newton_tol: float = Field(default=1e-12, alias="NEWTON_TOL", gt=0)
    newton_max_iter: int = Field(default=50, alias="NEWTON_MAX_ITER", ge=1, le=500)
    stiff_rtol: float = Field(default=1e-8, alias="STIFF_RTOL", gt=0)
    stiff_atol: float = Field(default=1e-10, alias="STIFF_ATOL", gt=0)

    # ===== Горизонты =====
    t_max_periods: int = Field(default=100, alias="T_MAX_PERIODS", ge=1)
    max_forks: int = Field(default=64, alias="MAX_FORKS", ge=1)
    sample_dt: float = Field(default=0.01, alias="SAMPLE_DT", gt=0, le=1.0)

    # ===== Вывод =====
    csv_digits: int = Field(default=17, alias="CSV_DIGITS", ge=6, le=17)
    runs_dir: Optional[str] = Field(default=None, alias="RUNS_DIR")

    # ===== Параллельность =====
    workers: int = Field(default=0, alias="WORKERS", ge=0, description="0 = число ядер")

    # ===== Логирование =====
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")

    # ===== Валидаторы =====

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v: Optional[str]) -> str:
        """Валидация уровня логирования."""
        if not v:
            return "INFO"
        v_upper = str(v).upper().strip()
        if v_upper not in _LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL должен быть одним из {', '.join(_LOG_LEVELS)}")
        return v_upper

    @model_validator(mode="after")
    def check_friction_levels(self) -> "Settings":
        """μ_s > μ_d > 0: статический порог выше динамического."""
        if self.mu_s <= self.mu_d:
            raise ValueError(f"MU_S ({self.mu_s}) должен быть больше MU_D ({self.mu_d})")
        return self

    # ===== Свойства =====

    @property
    def t_max(self) -> float:
        """Горизонт поиска событий в единицах времени."""
        return self.t_max_periods * 2.0 * 3.141592653589793

    @property
    def log_level_value(self) -> int:
        """Уровень логирования для logging."""
        return getattr(logging, self.log_level, logging.INFO)

    @property
    def float_format(self) -> str:
        """Формат чисел в CSV."""
        return f"%.{self.csv_digits}g"

    def validate_on_startup(self) -> None:
        """
        Проверяет согласованность настроек при старте.
        Выбрасывает ValueError при ошибках.
        """
        errors: List[str] = []
        log = logging.getLogger("stiction-lab.settings")

        if self.mu_s <= 1.0:
            # не ошибка модели, но периодического залипания не будет
            log.warning(f"MU_S={self.mu_s} <= 1: no periodic sticking leaves exist")

        if abs(self.gamma - 1.0) < self.resonance_band:
            log.warning(f"GAMMA={self.gamma} is inside the resonance band, slip arcs integrate numerically")

        if self.event_tol > self.classify_tol:
            errors.append("EVENT_TOL должен быть не больше CLASSIFY_TOL")

        if self.stiff_atol > self.stiff_rtol:
            errors.append("STIFF_ATOL должен быть не больше STIFF_RTOL")

        if errors:
            raise ValueError("Ошибки конфигурации:\n" + "\n".join(f"  • {e}" for e in errors))


# ===== Глобальный инстанс =====
_settings_instance: Optional[Settings] = None


def get_settings() -> Settings:
    """Возвращает глобальный инстанс настроек."""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = Settings()
    return _settings_instance


def reload_settings() -> Settings:
    """
    Перезагружает настройки из окружения и .env файла.

    Старый инстанс сбрасывается до валидации: если новые значения неверны,
    следующий get_settings() снова выбросит ValidationError.
    """
    global _settings_instance
    _settings_instance = None
    _settings_instance = Settings()
    return _settings_instance


class _LazySettings:
    """Прокси к get_settings(): импорт модулей не валидирует окружение."""

    def __getattr__(self, name: str):
        return getattr(get_settings(), name)

    def __repr__(self) -> str:
        return f"<lazy {get_settings()!r}>"


# ===== Быстрый доступ =====
settings: Settings = _LazySettings()  # type: ignore[assignment]
