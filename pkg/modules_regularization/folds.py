# modules_regularization/folds.py
"""
Свёрнутые особенности на линиях складки f± (ŷ = ±δ).

Десингуляризованная задача с поправкой Γ = γ²ε:
    ŷ̇ = −Γŷ − cos θ,  θ̇ = μ_d φ′(ŷ).
Особые точки: ŷ = ±δ, cos θ = ∓Γδ; существуют при Γδ ≤ 1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from config_package.constants import CriticalPointClass
from modules_common.errors import NoSingularitiesError
from modules_model.params import Params, wrap_angle
from modules_regularization.phi import RegParams

log = logging.getLogger("stiction-lab.reg.folds")

EXISTENCE_TOL = 1e-14


@dataclass(frozen=True)
class CriticalPoint:
    """
    Свёрнутая особенность.

    Attributes:
        yh: ŷ = ±δ
        theta: Фаза
        xi: ξ = ∓μ_s на складке
        klass: Класс особенности
        eigenvalues: Собственные значения линеаризации десингуляризованной задачи
        eigenvectors: Собственные векторы (столбцы) в координатах (ŷ, θ)
        Gamma: Значение Γ
    """

    yh: float
    theta: float
    xi: float
    klass: CriticalPointClass
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    Gamma: float

    @property
    def fold(self) -> str:
        """Метка линии складки: f+ при ŷ = δ, f− при ŷ = −δ."""
        return "f+" if self.yh > 0 else "f-"

    @property
    def is_saddle(self) -> bool:
        return self.klass is CriticalPointClass.FOLDED_SADDLE

    def x(self, p: Params) -> float:
        """Координата x точки при данном γ."""
        return (self.xi - math.sin(self.theta)) / p.gamma2

    def to_dict(self) -> dict:
        return {
            "yh": self.yh,
            "theta": self.theta,
            "xi": self.xi,
            "class": self.klass.value,
            "eigenvalues": [[complex(v).real, complex(v).imag] for v in self.eigenvalues],
            "Gamma": self.Gamma,
        }


def desingularized_jacobian(yh: float, theta: float, p: Params, rp: RegParams, Gamma: float) -> np.ndarray:
    return np.array([[-Gamma, math.sin(theta)], [p.mu_d * float(rp.phi.d2(yh)), 0.0]])


def _classify(jac: np.ndarray, Gamma: float) -> CriticalPointClass:
    det = float(np.linalg.det(jac))
    if det < 0.0:
        return CriticalPointClass.FOLDED_SADDLE
    if Gamma == 0.0:
        return CriticalPointClass.FOLDED_CENTER
    disc = Gamma * Gamma - 4.0 * det
    return CriticalPointClass.FOLDED_FOCUS_STABLE if disc < 0.0 else CriticalPointClass.FOLDED_NODE_STABLE


def _positions(delta: float, Gamma: float) -> List[Tuple[float, float]]:
    a = math.acos(min(1.0, Gamma * delta))
    return [
        (-delta, wrap_angle(a)),
        (-delta, wrap_angle(-a)),
        (delta, wrap_angle(math.pi - a)),
        (delta, wrap_angle(math.pi + a)),
    ]


def folded_singularities(p: Params, rp: RegParams, Gamma: float = 0.0) -> List[CriticalPoint]:
    """
    Особые точки десингуляризованной задачи на f±.

    Args:
        p: Параметры модели
        rp: Параметры регуляризации
        Gamma: Γ = γ²ε ≥ 0

    Returns:
        Четыре точки: по седлу и центру/фокусу/узлу на каждой линии складки

    Raises:
        NoSingularitiesError: при Γδ > 1
    """
    delta = rp.delta
    if Gamma * delta > 1.0 + EXISTENCE_TOL:
        raise NoSingularitiesError(
            f"no folded singularities for Gamma*delta={Gamma * delta:.6g} > 1", {"Gamma": Gamma, "delta": delta}
        )
    points: List[CriticalPoint] = []
    for yh, theta in _positions(delta, Gamma):
        jac = desingularized_jacobian(yh, theta, p, rp, Gamma)
        vals, vecs = np.linalg.eig(jac)
        order = np.argsort(-np.real(vals))
        points.append(
            CriticalPoint(
                yh=yh,
                theta=theta,
                xi=-p.mu_d * float(rp.phi.value(yh)),
                klass=_classify(jac, Gamma),
                eigenvalues=vals[order],
                eigenvectors=vecs[:, order],
                Gamma=Gamma,
            )
        )
    return points


def folded_saddles(p: Params, rp: RegParams, Gamma: float = 0.0) -> List[CriticalPoint]:
    return [c for c in folded_singularities(p, rp, Gamma) if c.is_saddle]


def gamma_upper_bound(rp: RegParams) -> float:
    """γ, выше которого свёрнутых седел нет: 1/√(εδ)."""
    return 1.0 / math.sqrt(rp.eps * rp.delta)


def _exists(p: Params, rp: RegParams, Gamma: float) -> bool:
    try:
        pts = folded_singularities(p, rp, Gamma)
    except NoSingularitiesError:
        return False
    return any(c.is_saddle for c in pts)


def locate_saddle_node_collision(p: Params, rp: RegParams, tol: float = 1e-12) -> Tuple[float, float]:
    """
    Бисекция по Γ до исчезновения седел (седло-узловое слияние).

    Returns:
        (Γ*, γ*), где γ* = √(Γ*/ε)
    """
    lo, hi = 0.0, 2.0 / rp.delta
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _exists(p, rp, mid):
            lo = mid
        else:
            hi = mid
    g_star = 0.5 * (lo + hi)
    log.debug(f"saddle-node collision at Gamma={g_star:.12g} (Gamma*delta={g_star * rp.delta:.12g})")
    return g_star, math.sqrt(g_star / rp.eps)


__all__ = [
    "CriticalPoint",
    "desingularized_jacobian",
    "folded_singularities",
    "folded_saddles",
    "gamma_upper_bound",
    "locate_saddle_node_collision",
]
