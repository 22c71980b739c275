# modules_model/params.py
"""
Типы значений модели трения покоя.

DimensionalParams — размерные параметры установки (масса на ленте с пружиной),
Params — безразмерные (γ, μ_s, μ_d), State — точка фазового пространства
(x, y, θ) ∈ ℝ² × T¹.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Приведение фазы к [0, 2π)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod(-1e-17) + 2π округляется до 2π
    if t >= TWO_PI:
        t = 0.0
    return t


class DimensionalParams(BaseModel):
    """Размерные параметры: масса, жёсткость, вынуждающая сила, трение."""

    model_config = ConfigDict(frozen=True)

    M: float = Field(gt=0, description="Масса")
    kappa: float = Field(gt=0, description="Жёсткость пружины")
    A: float = Field(gt=0, description="Амплитуда вынуждающей силы")
    omega: float = Field(gt=0, description="Частота вынуждающей силы")
    N: float = Field(gt=0, description="Нормальная сила")
    f_s: float = Field(gt=0, description="Коэффициент трения покоя")
    f_d: float = Field(gt=0, description="Коэффициент трения скольжения")
    V: float = Field(default=1.0, gt=0, description="Масштаб скорости (сокращается)")

    @model_validator(mode="after")
    def check_friction(self) -> "DimensionalParams":
        if self.f_s <= self.f_d:
            raise ValueError(f"f_s ({self.f_s}) должен быть больше f_d ({self.f_d})")
        return self


class Params(BaseModel):
    """Безразмерные параметры модели."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=0, description="Отношение частот Ω/ω")
    mu_s: float = Field(gt=0, description="Уровень трения покоя")
    mu_d: float = Field(gt=0, description="Уровень трения скольжения")

    @model_validator(mode="after")
    def check_friction(self) -> "Params":
        if self.mu_s <= self.mu_d:
            raise ValueError(f"mu_s ({self.mu_s}) должен быть больше mu_d ({self.mu_d})")
        return self

    @property
    def gamma2(self) -> float:
        return self.gamma * self.gamma

    def with_gamma(self, gamma: float) -> "Params":
        """Копия с другим γ (для продолжения по параметру)."""
        return Params(gamma=gamma, mu_s=self.mu_s, mu_d=self.mu_d)


@dataclass(frozen=True)
class State:
    """Точка z = (x, y, θ); θ всегда в [0, 2π)."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError(f"State must be finite, got ({self.x}, {self.y}, {self.theta})")

    @classmethod
    def from_array(cls, z: np.ndarray) -> "State":
        return cls(float(z[0]), float(z[1]), float(z[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta], dtype=float)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def with_y(self, y: float) -> "State":
        return State(self.x, y, self.theta)

    def distance(self, other: "State") -> float:
        """Евклидово расстояние с учётом периодичности θ."""
        dth = abs(self.theta - other.theta)
        dth = min(dth, TWO_PI - dth)
        return math.sqrt((self.x - other.x) ** 2 + (self.y - other.y) ** 2 + dth * dth)


__all__ = ["TWO_PI", "wrap_angle", "DimensionalParams", "Params", "State"]
