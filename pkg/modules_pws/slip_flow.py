# modules_pws/slip_flow.py
"""
Точное решение на дугах скольжения.

На дуге со знаком скорости σ уравнение линейно:
    x'' + γ²x = −sin(θ0 + t) − σμ_d,
    x(t) = c1·cos γt + c2·sin γt − sin(θ0 + t)/(γ² − 1) − σμ_d/γ².

Вблизи резонанса γ = 1 знаменатель γ² − 1 мал, и дуга интегрируется численно
(DOP853). При γ = 1 ровно частное решение резонансное:
x_p(t) = t·cos(θ0 + t)/2.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from config_package.settings import settings
from modules_common.errors import BackwardTimeError, ResonanceGuardError, StepFailureError
from modules_model.params import Params, State

log = logging.getLogger("stiction-lab.pws.slip")

ORACLE_RTOL = 1e-12
ORACLE_ATOL = 1e-13


def in_resonance_band(p: Params, band: Optional[float] = None) -> bool:
    band = settings.resonance_band if band is None else band
    return abs(p.gamma - 1.0) < band


@dataclass(frozen=True)
class SlipArc:
    """
    Дуга скольжения в замкнутой форме.

    Attributes:
        z0: Начальная точка дуги
        sigma: Знак скорости на дуге (±1)
        gamma: Частота γ
        mu_d: Уровень трения скольжения
        c1, c2: Коэффициенты однородной части
        k: 1/(γ² − 1) — амплитуда отклика на вынуждение
        offset: −σμ_d/γ² — сдвиг от постоянной силы трения
    """

    z0: State
    sigma: int
    gamma: float
    mu_d: float
    c1: float
    c2: float
    k: float
    offset: float

    @classmethod
    def build(cls, z0: State, sigma: int, p: Params) -> "SlipArc":
        g2 = p.gamma2
        k = 1.0 / (g2 - 1.0)
        offset = -sigma * p.mu_d / g2
        c1 = z0.x + k * math.sin(z0.theta) - offset
        c2 = (z0.y + k * math.cos(z0.theta)) / p.gamma
        return cls(z0=z0, sigma=int(sigma), gamma=p.gamma, mu_d=p.mu_d, c1=c1, c2=c2, k=k, offset=offset)

    def xy(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(x, y) в моменты t (время от начала дуги)."""
        t = np.asarray(t, dtype=float)
        gt = self.gamma * t
        cg, sg = np.cos(gt), np.sin(gt)
        ph = self.z0.theta + t
        x = self.c1 * cg + self.c2 * sg - self.k * np.sin(ph) + self.offset
        y = self.gamma * (-self.c1 * sg + self.c2 * cg) - self.k * np.cos(ph)
        return x, y

    def ydot(self, t: np.ndarray) -> np.ndarray:
        """y'(t) = −γ²x − sin(θ0 + t) − σμ_d."""
        x, _ = self.xy(t)
        return -(self.gamma**2) * x - np.sin(self.z0.theta + np.asarray(t, dtype=float)) - self.sigma * self.mu_d

    def state(self, t: float) -> State:
        x, y = self.xy(np.array(t))
        return State(float(x), float(y), self.z0.theta + t)

    def states(self, t: np.ndarray) -> np.ndarray:
        """Массив (N, 3) состояний; θ не приводится по модулю."""
        t = np.asarray(t, dtype=float)
        x, y = self.xy(t)
        return np.column_stack([x, y, self.z0.theta + t])


@dataclass(frozen=True)
class NumericSlipArc:
    """Дуга скольжения, проинтегрированная численно (резонансная полоса)."""

    z0: State
    sigma: int
    gamma: float
    mu_d: float
    horizon: float
    sol: object

    @classmethod
    def build(cls, z0: State, sigma: int, p: Params, horizon: float) -> "NumericSlipArc":
        g2 = p.gamma2
        th0 = z0.theta

        def rhs(t: float, u: np.ndarray) -> np.ndarray:
            return np.array([u[1], -g2 * u[0] - math.sin(th0 + t) - sigma * p.mu_d])

        res = solve_ivp(
            rhs,
            (0.0, max(horizon, 1e-12)),
            [z0.x, z0.y],
            method="DOP853",
            rtol=ORACLE_RTOL,
            atol=ORACLE_ATOL,
            dense_output=True,
        )
        if not res.success:
            raise StepFailureError(f"slip arc integration failed: {res.message}", {"gamma": p.gamma})
        return cls(z0=z0, sigma=int(sigma), gamma=p.gamma, mu_d=p.mu_d, horizon=horizon, sol=res.sol)

    def xy(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        t = np.asarray(t, dtype=float)
        u = self.sol(t)  # type: ignore[operator]
        return u[0], u[1]

    def ydot(self, t: np.ndarray) -> np.ndarray:
        x, _ = self.xy(t)
        return -(self.gamma**2) * x - np.sin(self.z0.theta + np.asarray(t, dtype=float)) - self.sigma * self.mu_d

    def state(self, t: float) -> State:
        x, y = self.xy(np.array(t))
        return State(float(x), float(y), self.z0.theta + t)

    def states(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        x, y = self.xy(t)
        return np.column_stack([x, y, self.z0.theta + t])


def slip_flow_closed_form(
    z0: State, sigma: int, p: Params, t: float, band: Optional[float] = None
) -> State:
    """
    Состояние на дуге скольжения через время t (замкнутая формула).

    Raises:
        ResonanceGuardError: если |γ − 1| внутри защитной полосы
        BackwardTimeError: при t < 0
    """
    if t < 0:
        raise BackwardTimeError(f"negative time {t}", {"t": t})
    if in_resonance_band(p, band):
        raise ResonanceGuardError(
            f"closed form undefined near resonance: gamma={p.gamma}", {"gamma": p.gamma}
        )
    return SlipArc.build(z0, sigma, p).state(t)


def slip_flow_numeric(z0: State, sigma: int, p: Params, t: float) -> State:
    """Та же дуга, проинтегрированная DOP853 (оракул и резонансный режим)."""
    if t < 0:
        raise BackwardTimeError(f"negative time {t}", {"t": t})
    if t == 0:
        return z0
    return NumericSlipArc.build(z0, sigma, p, t).state(t)


def slip_flow(z0: State, sigma: int, p: Params, t: float, band: Optional[float] = None) -> State:
    """Замкнутая формула вне резонансной полосы, численное решение внутри неё."""
    if in_resonance_band(p, band):
        log.debug(f"gamma={p.gamma} inside resonance band, integrating slip arc numerically")
        return slip_flow_numeric(z0, sigma, p, t)
    return slip_flow_closed_form(z0, sigma, p, t, band)


def make_slip_arc(z0: State, sigma: int, p: Params, horizon: float, band: Optional[float] = None):
    """Вычислитель дуги: SlipArc или NumericSlipArc."""
    if in_resonance_band(p, band):
        return NumericSlipArc.build(z0, sigma, p, horizon)
    return SlipArc.build(z0, sigma, p)


def slip_flow_jacobian(z0: State, sigma: int, p: Params, t: float) -> np.ndarray:
    """
    Производная потока скольжения ∂(x, y, θ)(t)/∂(x0, y0, θ0).

    Не зависит от σ: трение входит только постоянным слагаемым.
    """
    if in_resonance_band(p):
        raise ResonanceGuardError(
            f"analytic slip Jacobian undefined near resonance: gamma={p.gamma}", {"gamma": p.gamma}
        )
    g = p.gamma
    k = 1.0 / (p.gamma2 - 1.0)
    cg, sg = math.cos(g * t), math.sin(g * t)
    c0, s0 = math.cos(z0.theta), math.sin(z0.theta)
    ct, st = math.cos(z0.theta + t), math.sin(z0.theta + t)
    dx_dth = k * c0 * cg - (k * s0 / g) * sg - k * ct
    dy_dth = -g * k * c0 * sg - k * s0 * cg + k * st
    return np.array(
        [
            [cg, sg / g, dx_dth],
            [-g * sg, cg, dy_dth],
            [0.0, 0.0, 1.0],
        ]
    )


__all__ = [
    "SlipArc",
    "NumericSlipArc",
    "in_resonance_band",
    "make_slip_arc",
    "slip_flow",
    "slip_flow_closed_form",
    "slip_flow_numeric",
    "slip_flow_jacobian",
]
