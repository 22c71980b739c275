# modules_regularization/slow_fast.py
"""
Регуляризованное поле в медленном и быстром времени, критическое многообразие
и редуцированная задача на нём.

    x' = y,  y' = −ξ(x, θ) − μ_d φ(y/ε),  θ' = 1
    ŷ = y/ε: медленная задача εŷ′ = −ξ − μ_d φ(ŷ), быстрая τ = t/ε.
"""
from __future__ import annotations

import logging
import math
from typing import List, NamedTuple, Optional

import numpy as np

from config_package.constants import CriticalBranch, PhiShape, SingularSet
from config_package.settings import settings
from modules_common.errors import SingularLineError
from modules_model.params import TWO_PI, Params, State, wrap_angle
from modules_model.services import HALF_PI, THREE_HALF_PI, xi
from modules_regularization.phi import RegParams

log = logging.getLogger("stiction-lab.reg")

# допуск |φ′(ŷ)| для линии особенностей редуцированной задачи
SINGULAR_LINE_TOL = 1e-12
ROOT_RANGE_TOL = 1e-12


class CriticalRoot(NamedTuple):
    """Корень φ(ŷ) = −ξ/μ_d и ветвь критического многообразия."""

    yh: float
    branch: CriticalBranch


class ReducedFlow(NamedTuple):
    """Производные (ŷ, θ) редуцированной задачи в двух временах."""

    reduced: np.ndarray
    desingularized: np.ndarray


# ── Поля ────────────────────────────────────────────────────────────────────


def regularized_rhs(z: State, p: Params, rp: RegParams) -> np.ndarray:
    """Гладкое поле Z_ε; совпадает с Z± при y ≷ ±ε."""
    v = xi(z.x, z.theta, p)
    return np.array([z.y, -v - p.mu_d * float(rp.phi.value(z.y / rp.eps)), 1.0])


def regularized_rhs_array(t: float, u: np.ndarray, p: Params, rp: RegParams) -> np.ndarray:
    """Правая часть для solve_ivp; θ в u[2] не приводится по модулю."""
    v = p.gamma2 * u[0] + math.sin(u[2])
    return np.array([u[1], -v - p.mu_d * float(rp.phi.value(u[1] / rp.eps)), 1.0])


def regularized_jacobian(t: float, u: np.ndarray, p: Params, rp: RegParams) -> np.ndarray:
    """Якобиан Z_ε; жёсткость в ∂y′/∂y = −μ_d φ′(y/ε)/ε."""
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [-p.gamma2, -p.mu_d * float(rp.phi.d1(u[1] / rp.eps)) / rp.eps, -math.cos(u[2])],
            [0.0, 0.0, 0.0],
        ]
    )


def slow_rhs(x: float, yh: float, theta: float, p: Params, rp: RegParams) -> np.ndarray:
    """Медленная задача в переменных (x, ŷ, θ): (εŷ, (−ξ − μ_dφ(ŷ))/ε, 1)."""
    v = xi(x, theta, p)
    return np.array([rp.eps * yh, (-v - p.mu_d * float(rp.phi.value(yh))) / rp.eps, 1.0])


def fast_rhs(
    x: float, yh: float, theta: float, p: Params, rp: RegParams, eps: Optional[float] = None
) -> np.ndarray:
    """
    Быстрая задача (τ = t/ε): ẋ = ε²ŷ, ŷ̇ = −ξ − μ_dφ(ŷ), θ̇ = ε.

    eps=0 даёт слойную задачу.
    """
    e = rp.eps if eps is None else eps
    v = xi(x, theta, p)
    return np.array([e * e * yh, -v - p.mu_d * float(rp.phi.value(yh)), e])


# ── Критическое многообразие ────────────────────────────────────────────────


def critical_manifold_roots(xi_value: float, p: Params, rp: RegParams) -> List[CriticalRoot]:
    """
    Корни φ(ŷ) = −ξ/μ_d на [−1, 1] с метками ветвей.

    Один корень на C_a при |ξ| < μ_d; при μ_d < |ξ| < μ_s добавляется корень
    на ветви C_r со стороны sign(−ξ). На складке |ξ| = μ_s двойной корень ±δ
    возвращается дважды (C_a и C_r). Для монотонной φ ветвей C_r нет.
    """
    phi = rp.phi
    r = -xi_value / p.mu_d
    roots: List[CriticalRoot] = []
    lo, hi = phi.range_of(CriticalBranch.C_A)
    if lo - ROOT_RANGE_TOL <= r <= hi + ROOT_RANGE_TOL:
        roots.append(CriticalRoot(phi.inverse(min(max(r, lo), hi), CriticalBranch.C_A), CriticalBranch.C_A))
    if phi.shape is PhiShape.MONOTONE:
        return roots

    # на |ŷ| = 1 корень вырождается в полупрямую φ ≡ ±1, концы исключены
    branch = CriticalBranch.C_R_PLUS if r > 0 else CriticalBranch.C_R_MINUS
    lo, hi = phi.range_of(branch)
    inner = abs(r) > 1.0 + ROOT_RANGE_TOL
    if inner and lo - ROOT_RANGE_TOL <= r <= hi + ROOT_RANGE_TOL:
        roots.append(CriticalRoot(phi.inverse(min(max(r, lo), hi), branch), branch))
    return sorted(roots, key=lambda c: c.yh)


def critical_yh(xi_value: float, p: Params, rp: RegParams, branch: CriticalBranch) -> float:
    """ŷ на заданной ветви C₀ при данном ξ (с отсечкой к образу ветви)."""
    lo, hi = rp.phi.range_of(branch)
    r = min(max(-xi_value / p.mu_d, lo), hi)
    return rp.phi.inverse(r, branch)


# ── Редуцированная задача ───────────────────────────────────────────────────


def desingularized_flow(yh: float, theta: float, p: Params, rp: RegParams, Gamma: float = 0.0) -> np.ndarray:
    """ŷ̇ = −Γŷ − cos θ, θ̇ = μ_d φ′(ŷ)."""
    return np.array([-Gamma * yh - math.cos(theta), p.mu_d * float(rp.phi.d1(yh))])


def reduced_flow(yh: float, theta: float, p: Params, rp: RegParams, Gamma: float = 0.0) -> ReducedFlow:
    """
    Редуцированная задача в исходном и десингуляризованном времени.

    Исходное время: ŷ′ = −(Γŷ + cos θ)/(μ_d φ′(ŷ)), θ′ = 1. Там, где φ′ < 0
    (ветви C_r±), направление десингуляризованного времени обратное.

    Raises:
        SingularLineError: на линиях складки φ′(ŷ) = 0
    """
    des = desingularized_flow(yh, theta, p, rp, Gamma)
    dphi = float(rp.phi.d1(yh))
    if abs(dphi) <= SINGULAR_LINE_TOL:
        raise SingularLineError(
            f"reduced flow is singular on the fold line yh={yh}", {"yh": yh, "theta": theta}
        )
    return ReducedFlow(reduced=np.array([des[0] / (p.mu_d * dphi), 1.0]), desingularized=des)


# ── Множества неединственности регуляризованной задачи ──────────────────────


def regularized_singular_set(
    yh: float, xi_value: float, theta: float, p: Params, rp: RegParams, tol: Optional[float] = None
) -> Optional[SingularSet]:
    """
    Принадлежность отрезкам Î± на линиях складки.

    Î⁻: ξ = μ_s, ŷ = −δ, θ ∈ (π/2, 3π/2); Î⁺: ξ = −μ_s, ŷ = δ, θ ∈ [0, π/2) ∪ (3π/2, 2π).
    """
    tol = settings.classify_tol if tol is None else tol
    th = wrap_angle(theta)
    if abs(xi_value - p.mu_s) <= tol and abs(yh + rp.delta) <= tol:
        return SingularSet.I_MINUS if HALF_PI < th < THREE_HALF_PI else None
    if abs(xi_value + p.mu_s) <= tol and abs(yh - rp.delta) <= tol:
        return SingularSet.I_PLUS if (th < HALF_PI or th > THREE_HALF_PI) else None
    return None


def _backward_gap(theta: float, phases: List[float]) -> float:
    """Наименьшее время назад до фазы из списка."""
    best = math.inf
    for ph in phases:
        dt = (theta - ph) % TWO_PI
        if dt <= 1e-14:
            dt = TWO_PI
        best = min(best, dt)
    return best


def _phases(s: float) -> List[float]:
    if abs(s) > 1.0:
        return []
    a = math.asin(s)
    return [wrap_angle(a), wrap_angle(math.pi - a)]


def repelling_set_membership(x: float, theta: float, p: Params, rp: RegParams) -> Optional[CriticalBranch]:
    """
    Принадлежность точки (x, θ) множествам Q_r±.

    Q_r± — точки C_r±, чьи решения в обратном времени приходят на Î±.
    На C₀ редуцированное движение проектируется в (x, θ)′ = (0, 1), так что
    обратный ход идёт по листу x = const до первого выхода ξ на μ_s или μ_d.

    Returns:
        C_R_MINUS / C_R_PLUS или None
    """
    if rp.shape is PhiShape.MONOTONE:
        return None
    g2x = p.gamma2 * x
    v = g2x + math.sin(theta)
    if p.mu_d < v < p.mu_s:
        fold, edge, branch, window = p.mu_s, p.mu_d, CriticalBranch.C_R_MINUS, SingularSet.I_MINUS
    elif -p.mu_s < v < -p.mu_d:
        fold, edge, branch, window = -p.mu_s, -p.mu_d, CriticalBranch.C_R_PLUS, SingularSet.I_PLUS
    else:
        return None

    to_fold = _backward_gap(theta, _phases(fold - g2x))
    to_edge = _backward_gap(theta, _phases(edge - g2x))
    if not to_fold < to_edge:
        return None
    th_fold = wrap_angle(theta - to_fold)
    yh_fold = -rp.delta if window is SingularSet.I_MINUS else rp.delta
    hit = regularized_singular_set(yh_fold, fold, th_fold, p, rp)
    return branch if hit is window else None


__all__ = [
    "CriticalRoot",
    "ReducedFlow",
    "regularized_rhs",
    "regularized_rhs_array",
    "regularized_jacobian",
    "slow_rhs",
    "fast_rhs",
    "critical_manifold_roots",
    "critical_yh",
    "desingularized_flow",
    "reduced_flow",
    "regularized_singular_set",
    "repelling_set_membership",
]
