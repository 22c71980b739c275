# modules_regularization/phi.py
"""
Функция регуляризации φ и параметры регуляризованной системы.

φ(y) = a y⁷ + b y⁵ + c y³ + d y на [−1, 1], φ(y) = sign(y) вне отрезка.
Коэффициенты задаются условиями φ(1) = 1, φ′(1) = 0, φ(δ) = μ_s/μ_d, φ′(δ) = 0.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from config_package.constants import CriticalBranch, PhiShape
from config_package.settings import settings
from modules_common.errors import ShapeViolationError, SingularSystemError
from modules_model.params import Params

log = logging.getLogger("stiction-lab.reg.phi")

ArrayLike = Union[float, np.ndarray]

INVERSE_XTOL = 1e-13
CONDITION_TOL = 1e-12


def _as_output(value: np.ndarray, y: ArrayLike) -> ArrayLike:
    return float(value) if np.ndim(y) == 0 else value


@dataclass(frozen=True)
class PhiPolynomial:
    """
    Нечётный полином седьмой степени с внутренним максимумом в y = δ.

    Attributes:
        a, b, c, d: Коэффициенты при y⁷, y⁵, y³, y
        delta: Положение экстремума (для монотонной формы — 1)
        ratio: φ(δ) = μ_s/μ_d
        shape: Форма функции
    """

    a: float
    b: float
    c: float
    d: float
    delta: float
    ratio: float
    shape: PhiShape = PhiShape.STICTION

    @property
    def coefficients(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def value(self, y: ArrayLike) -> ArrayLike:
        """φ(y)."""
        u = np.asarray(y, dtype=float)
        u2 = u * u
        poly = u * (((self.a * u2 + self.b) * u2 + self.c) * u2 + self.d)
        return _as_output(np.where(np.abs(u) < 1.0, poly, np.sign(u)), y)

    def d1(self, y: ArrayLike) -> ArrayLike:
        """φ′(y)."""
        u = np.asarray(y, dtype=float)
        u2 = u * u
        poly = ((7.0 * self.a * u2 + 5.0 * self.b) * u2 + 3.0 * self.c) * u2 + self.d
        return _as_output(np.where(np.abs(u) < 1.0, poly, 0.0), y)

    def d2(self, y: ArrayLike) -> ArrayLike:
        """φ″(y)."""
        u = np.asarray(y, dtype=float)
        u2 = u * u
        poly = u * ((42.0 * self.a * u2 + 20.0 * self.b) * u2 + 6.0 * self.c)
        return _as_output(np.where(np.abs(u) < 1.0, poly, 0.0), y)

    def interval(self, branch: CriticalBranch) -> Tuple[float, float]:
        """Отрезок монотонности φ, на котором лежит ветвь."""
        if self.shape is PhiShape.MONOTONE:
            if branch is not CriticalBranch.C_A:
                raise ValueError(f"monotone regularization has no {branch.value} branch")
            return (-1.0, 1.0)
        if branch is CriticalBranch.C_A:
            return (-self.delta, self.delta)
        if branch is CriticalBranch.C_R_PLUS:
            return (self.delta, 1.0)
        return (-1.0, -self.delta)

    def branch_of(self, yh: float) -> CriticalBranch:
        if self.shape is PhiShape.MONOTONE or abs(yh) <= self.delta:
            return CriticalBranch.C_A
        return CriticalBranch.C_R_PLUS if yh > 0 else CriticalBranch.C_R_MINUS

    def range_of(self, branch: CriticalBranch) -> Tuple[float, float]:
        """Значения φ на отрезке ветви (min, max)."""
        lo, hi = self.interval(branch)
        v_lo, v_hi = float(self.value(lo)), float(self.value(hi))
        return (min(v_lo, v_hi), max(v_lo, v_hi))

    def inverse(self, r: float, branch: CriticalBranch = CriticalBranch.C_A) -> float:
        """
        φ⁻¹(r) на отрезке монотонности ветви (бисекция до 1e-13).

        Raises:
            ValueError: если r вне образа ветви
        """
        lo, hi = self.interval(branch)
        f_lo = float(self.value(lo)) - r
        f_hi = float(self.value(hi)) - r
        tol = CONDITION_TOL * max(1.0, self.ratio)
        if abs(f_lo) <= tol:
            return lo
        if abs(f_hi) <= tol:
            return hi
        if f_lo * f_hi > 0.0:
            raise ValueError(f"r={r} is outside the image of {branch.value}")
        return float(brentq(lambda u: float(self.value(u)) - r, lo, hi, xtol=INVERSE_XTOL, rtol=4 * np.finfo(float).eps))

    def conditions_residual(self) -> np.ndarray:
        """Невязки четырёх определяющих условий."""
        return np.array(
            [
                self._poly(1.0) - 1.0,
                self._poly_d1(1.0),
                self._poly(self.delta) - self.ratio,
                self._poly_d1(self.delta),
            ]
        )

    def _poly(self, u: float) -> float:
        u2 = u * u
        return u * (((self.a * u2 + self.b) * u2 + self.c) * u2 + self.d)

    def _poly_d1(self, u: float) -> float:
        u2 = u * u
        return ((7.0 * self.a * u2 + 5.0 * self.b) * u2 + 3.0 * self.c) * u2 + self.d

    def check_shape(self, n: int = 2001) -> None:
        """
        Проверка формы: φ′ > 0 на (0, δ), φ′ < 0 на (δ, 1), φ″(δ) < 0.

        Raises:
            ShapeViolationError: при нарушении
        """
        if self.shape is PhiShape.MONOTONE:
            inner = np.linspace(0.0, 1.0, n)[1:-1]
            if np.any(self.d1(inner) <= 0.0):
                raise ShapeViolationError("monotone phi must increase on (0, 1)", {})
            return
        left = np.linspace(0.0, self.delta, n)[1:-1]
        right = np.linspace(self.delta, 1.0, n)[1:-1]
        problems = []
        if np.any(self.d1(left) <= 0.0):
            problems.append("phi' must be positive on (0, delta)")
        if np.any(self.d1(right) >= 0.0):
            problems.append("phi' must be negative on (delta, 1)")
        if not float(self.d2(self.delta)) < 0.0:
            problems.append("phi''(delta) must be negative")
        if problems:
            raise ShapeViolationError(
                "; ".join(problems),
                {"delta": self.delta, "ratio": self.ratio, "coefficients": list(self.coefficients)},
            )


def build_phi(delta: float, mu_s: float, mu_d: float) -> PhiPolynomial:
    """
    Строит φ по положению экстремума δ и отношению μ_s/μ_d.

    Args:
        delta: 0 < δ < 1
        mu_s: Уровень трения покоя
        mu_d: Уровень трения скольжения (μ_s/μ_d > 1)

    Returns:
        PhiPolynomial, прошедший проверку формы

    Raises:
        SingularSystemError: если система условий вырождена
        ShapeViolationError: если форма φ нарушена для данного δ
    """
    if not 0.0 < delta < 1.0:
        raise ShapeViolationError(f"delta must lie in (0, 1), got {delta}", {"delta": delta})
    ratio = mu_s / mu_d
    if not ratio > 1.0:
        raise ShapeViolationError(f"mu_s/mu_d must exceed 1, got {ratio}", {"ratio": ratio})

    d2, d4, d6 = delta**2, delta**4, delta**6
    m = np.array(
        [
            [1.0, 1.0, 1.0, 1.0],
            [7.0, 5.0, 3.0, 1.0],
            [delta * d6, delta * d4, delta * d2, delta],
            [7.0 * d6, 5.0 * d4, 3.0 * d2, 1.0],
        ]
    )
    rhs = np.array([1.0, 0.0, ratio, 0.0])
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularSystemError(f"phi conditions are singular for delta={delta}", {"cond": float(cond)})
    try:
        a, b, c, d = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(f"phi conditions are singular: {e}", {"delta": delta}) from e

    phi = PhiPolynomial(float(a), float(b), float(c), float(d), float(delta), float(ratio))
    res = np.max(np.abs(phi.conditions_residual()))
    if res > CONDITION_TOL * max(1.0, ratio):
        log.warning(f"phi conditions residual {res:.3e} above tolerance (cond={cond:.3e})")
    phi.check_shape()
    log.debug(f"phi coefficients a={a:.6g} b={b:.6g} c={c:.6g} d={d:.6g}, phi''(delta)={phi.d2(delta):.6g}")
    return phi


def build_phi_st() -> PhiPolynomial:
    """Монотонная функция φ = (3y − y³)/2 (только для отрицательного контроля)."""
    phi = PhiPolynomial(0.0, 0.0, -0.5, 1.5, delta=1.0, ratio=1.0, shape=PhiShape.MONOTONE)
    phi.check_shape()
    return phi


class RegParams(BaseModel):
    """Параметры регуляризации: ε и функция φ."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eps: float = Field(gt=0, description="Толщина слоя регуляризации")
    phi: PhiPolynomial

    @property
    def delta(self) -> float:
        return self.phi.delta

    @property
    def shape(self) -> PhiShape:
        return self.phi.shape

    @classmethod
    def create(
        cls,
        p: Params,
        eps: Optional[float] = None,
        delta: Optional[float] = None,
        shape: PhiShape = PhiShape.STICTION,
    ) -> "RegParams":
        """Параметры регуляризации с умолчаниями из настроек."""
        eps = settings.eps if eps is None else eps
        if shape is PhiShape.MONOTONE:
            return cls(eps=eps, phi=build_phi_st())
        delta = settings.delta if delta is None else delta
        return cls(eps=eps, phi=build_phi(delta, p.mu_s, p.mu_d))

    def with_eps(self, eps: float) -> "RegParams":
        return RegParams(eps=eps, phi=self.phi)


__all__ = ["PhiPolynomial", "RegParams", "build_phi", "build_phi_st"]
