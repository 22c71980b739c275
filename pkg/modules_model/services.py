# modules_model/services.py
"""
Модель осциллятора с трением покоя: закон трения, векторные поля,
классификация областей и касаний.

Уравнения (безразмерные):
    Z±:  x' = y,  y' = −ξ(x, θ) ∓ μ_d,  θ' = 1,   ξ = γ²x + sin θ
    Z_s: (x, θ)' = (0, 1) на y = 0, |ξ| < μ_s
"""
from __future__ import annotations

import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np

from config_package.constants import (
    FieldBranch,
    RegionLabel,
    SingularSet,
    SlidingKind,
    StickingLeaf,
    TangencyKind,
    TangencyLabel,
)
from config_package.settings import settings
from modules_common.errors import (
    BranchNotApplicableError,
    NotOnTangencySetError,
    UndefinedFrictionError,
)
from modules_model.params import DimensionalParams, Params, State

log = logging.getLogger("stiction-lab.model")

HALF_PI = 0.5 * math.pi
THREE_HALF_PI = 1.5 * math.pi

# допуск на нулевую производную Ли
LIE_TOL = 1e-12
# допуск на совпадение фазы с точкой касания θ ∈ {π/2, 3π/2}
TANGENCY_PHASE_TOL = 1e-8


class Region(NamedTuple):
    """Метка области и (для граничных точек) принадлежность I±."""

    label: RegionLabel
    i_set: Optional[SingularSet] = None


# ── Параметры ───────────────────────────────────────────────────────────────


def nondimensionalize(dp: DimensionalParams) -> Params:
    """
    Переход к безразмерным параметрам.

    γ = √(κ/M)/ω, μ_s = N f_s / A, μ_d = N f_d / A. Масштаб скорости V
    сокращается и не используется.
    """
    gamma = math.sqrt(dp.kappa / dp.M) / dp.omega
    return Params(gamma=gamma, mu_s=dp.N * dp.f_s / dp.A, mu_d=dp.N * dp.f_d / dp.A)


# ── Закон трения и поля ─────────────────────────────────────────────────────


def xi(x: float, theta: float, p: Params) -> float:
    """Безразмерная сила пружины и вынуждения: ξ = γ²x + sin θ."""
    return p.gamma2 * x + math.sin(theta)


def friction(y: float, xi_value: float, p: Params, tol: Optional[float] = None) -> float:
    """
    Закон трения покоя μ(y, ξ).

    Args:
        y: Скорость
        xi_value: Значение ξ
        p: Параметры
        tol: Допуск на |ξ| = μ_s (по умолчанию CLASSIFY_TOL)

    Returns:
        −μ_d·sign(y) при скольжении, ξ при залипании, μ_s·sign(ξ) при срыве

    Raises:
        UndefinedFrictionError: при y = 0 и |ξ| = μ_s
    """
    if y != 0.0:
        return -p.mu_d * math.copysign(1.0, y)
    tol = settings.classify_tol if tol is None else tol
    if abs(abs(xi_value) - p.mu_s) <= tol:
        raise UndefinedFrictionError(
            f"friction undefined at y=0, |xi|=mu_s ({xi_value})", {"xi": xi_value, "mu_s": p.mu_s}
        )
    if abs(xi_value) < p.mu_s:
        return xi_value
    return p.mu_s * math.copysign(1.0, xi_value)


def vector_field(z: State, p: Params, branch: FieldBranch, tol: Optional[float] = None) -> np.ndarray:
    """
    Гладкое поле Z+, Z− или Z_s в точке z.

    Z± возвращаются как гладкие продолжения на замыкания G± (знак y не проверяется).
    """
    if branch is FieldBranch.STICK:
        tol = settings.classify_tol if tol is None else tol
        if abs(z.y) > tol:
            raise BranchNotApplicableError(f"stick field requires y=0, got y={z.y}", {"y": z.y})
        return np.array([0.0, 0.0, 1.0])
    s = 1.0 if branch is FieldBranch.PLUS else -1.0
    return np.array([z.y, -xi(z.x, z.theta, p) - s * p.mu_d, 1.0])


# ── Области ─────────────────────────────────────────────────────────────────


def _in_i_minus_window(theta: float) -> bool:
    return theta <= HALF_PI + TANGENCY_PHASE_TOL or theta >= THREE_HALF_PI - TANGENCY_PHASE_TOL


def _in_i_plus_window(theta: float) -> bool:
    return HALF_PI - TANGENCY_PHASE_TOL <= theta <= THREE_HALF_PI + TANGENCY_PHASE_TOL


def classify(z: State, p: Params, tol: Optional[float] = None) -> Region:
    """
    Классификация точки по стратам.

    Граничные точки ∂Σ_c± дополнительно помечаются принадлежностью к I±:
    I⁻ — ξ = μ_s, θ ∈ [0, π/2] ∪ [3π/2, 2π); I⁺ — ξ = −μ_s, θ ∈ [π/2, 3π/2].
    """
    tol = settings.classify_tol if tol is None else tol
    if z.y > tol:
        return Region(RegionLabel.G_PLUS)
    if z.y < -tol:
        return Region(RegionLabel.G_MINUS)

    v = xi(z.x, z.theta, p)
    if abs(v - p.mu_s) <= tol:
        return Region(
            RegionLabel.BOUNDARY_C_MINUS,
            SingularSet.I_MINUS if _in_i_minus_window(z.theta) else None,
        )
    if abs(v + p.mu_s) <= tol:
        return Region(
            RegionLabel.BOUNDARY_C_PLUS,
            SingularSet.I_PLUS if _in_i_plus_window(z.theta) else None,
        )
    if v > p.mu_s:
        return Region(RegionLabel.SIGMA_C_MINUS)
    if v < -p.mu_s:
        return Region(RegionLabel.SIGMA_C_PLUS)
    return Region(RegionLabel.SIGMA_S)


def filippov_sliding_region(z: State, p: Params, tol: Optional[float] = None) -> SlidingKind:
    """
    Сравнение области залипания с областью скольжения Филиппова на y = 0.

    Σ_{s,Filippov} = {|ξ| < μ_d} строго внутри Σ_s = {|ξ| < μ_s} при μ_d < μ_s.
    """
    tol = settings.classify_tol if tol is None else tol
    if abs(z.y) > tol:
        raise BranchNotApplicableError(f"sliding region is defined on y=0, got y={z.y}", {"y": z.y})
    a = abs(xi(z.x, z.theta, p))
    if abs(a - p.mu_d) <= tol or abs(a - p.mu_s) <= tol:
        return SlidingKind.DEGENERATE
    if a < p.mu_d:
        return SlidingKind.FILIPPOV_SLIDING
    if a < p.mu_s:
        return SlidingKind.STICTION_ONLY_SLIDING
    return SlidingKind.CROSSING


def sticking_leaf_kind(x: float, p: Params) -> StickingLeaf:
    """
    Тип листа залипания {x = const}: PERIODIC, если |γ²x| < μ_s − 1
    (лист целиком внутри Σ_s), иначе ESCAPING.
    """
    return StickingLeaf.PERIODIC if abs(p.gamma2 * x) < p.mu_s - 1.0 else StickingLeaf.ESCAPING


# ── Касания ─────────────────────────────────────────────────────────────────


def lie_derivatives(z: State, p: Params, which: TangencyKind) -> Tuple[float, float, float]:
    """
    Первые три производные Ли функции χ, задающей множество.

    Z_s на ∂Σ_c⁻: χ = μ_s − ξ → (−cos θ, sin θ, cos θ)
    Z_s на ∂Σ_c⁺: χ = μ_s + ξ → (cos θ, −sin θ, −cos θ)
    Z⁻ на Σ:      χ = −y      → (ξ − μ_d, γ²y + cos θ, γ²(μ_d − ξ) − sin θ)
    Z⁺ на Σ:      χ = y       → (−ξ − μ_d, −γ²y − cos θ, γ²(ξ + μ_d) + sin θ)
    """
    c, s = math.cos(z.theta), math.sin(z.theta)
    if which is TangencyKind.ZS_ON_BOUNDARY_C_MINUS:
        return (-c, s, c)
    if which is TangencyKind.ZS_ON_BOUNDARY_C_PLUS:
        return (c, -s, -c)
    v = xi(z.x, z.theta, p)
    g2 = p.gamma2
    if which is TangencyKind.Z_MINUS_ON_SIGMA:
        return (v - p.mu_d, g2 * z.y + c, g2 * (p.mu_d - v) - s)
    return (-v - p.mu_d, -g2 * z.y - c, g2 * (v + p.mu_d) + s)


def _on_tangency_set(z: State, p: Params, which: TangencyKind, tol: float) -> bool:
    if abs(z.y) > tol:
        return False
    v = xi(z.x, z.theta, p)
    target = {
        TangencyKind.ZS_ON_BOUNDARY_C_MINUS: p.mu_s,
        TangencyKind.ZS_ON_BOUNDARY_C_PLUS: -p.mu_s,
        TangencyKind.Z_MINUS_ON_SIGMA: p.mu_d,
        TangencyKind.Z_PLUS_ON_SIGMA: -p.mu_d,
    }[which]
    return abs(v - target) <= tol


def tangency(
    z: State,
    p: Params,
    which: TangencyKind,
    tol: Optional[float] = None,
    lie_tol: float = LIE_TOL,
) -> TangencyLabel:
    """
    Тип касания поля с границей.

    Args:
        z: Точка на множестве (∂Σ_c± или линия ξ = ±μ_d на Σ)
        p: Параметры
        which: Пара поле/множество
        tol: Допуск принадлежности множеству
        lie_tol: Допуск на обращение производной Ли в ноль

    Returns:
        VISIBLE / INVISIBLE при ℒ²χ ≷ 0, CUSP при ℒ²χ = 0, ℒ³χ ≠ 0,
        NONE при трансверсальности (ℒχ ≠ 0)

    Raises:
        NotOnTangencySetError: если z не на множестве
    """
    tol = settings.classify_tol if tol is None else tol
    if not _on_tangency_set(z, p, which, tol):
        raise NotOnTangencySetError(
            f"point is not on the set for {which.value}",
            {"state": z.as_tuple(), "xi": xi(z.x, z.theta, p)},
        )
    l1, l2, l3 = lie_derivatives(z, p, which)
    # на линиях ξ = ±μ_d первая производная зануляется тождественно
    if abs(l1) > max(lie_tol, tol):
        return TangencyLabel.NONE
    if l2 > lie_tol:
        return TangencyLabel.VISIBLE
    if l2 < -lie_tol:
        return TangencyLabel.INVISIBLE
    if abs(l3) > lie_tol:
        return TangencyLabel.CUSP
    return TangencyLabel.NONE


def forward_singular_set(z: State, p: Params, tol: Optional[float] = None) -> Optional[SingularSet]:
    """
    Точка прямой неединственности для дуги залипания, пришедшей на ∂Σ_c±.

    Точка должна лежать в I± и допускать продолжение залипанием, то есть
    Z_s не выводит её из замыкания Σ_s: на I± это ровно видимое касание
    (θ = π/2 на ∂Σ_c⁻, θ = 3π/2 на ∂Σ_c⁺). Во всех остальных точках I± поле
    Z_s направлено наружу и срыв в скольжение единственен.
    """
    region = classify(z, p, tol)
    if region.i_set is None:
        return None
    which = (
        TangencyKind.ZS_ON_BOUNDARY_C_MINUS
        if region.label is RegionLabel.BOUNDARY_C_MINUS
        else TangencyKind.ZS_ON_BOUNDARY_C_PLUS
    )
    l1, l2, _ = lie_derivatives(z, p, which)
    if abs(l1) <= TANGENCY_PHASE_TOL and l2 > 0.0:
        return region.i_set
    if l1 > TANGENCY_PHASE_TOL:
        # Z_s ведёт внутрь Σ_s: оба продолжения допустимы
        return region.i_set
    return None


def sticking_points_inward(z: State, p: Params) -> bool:
    """True, если Z_s в граничной точке ∂Σ_c± ведёт внутрь Σ_s (ℒχ ≥ 0)."""
    v = xi(z.x, z.theta, p)
    which = (
        TangencyKind.ZS_ON_BOUNDARY_C_MINUS if v > 0 else TangencyKind.ZS_ON_BOUNDARY_C_PLUS
    )
    l1, l2, _ = lie_derivatives(z, p, which)
    if abs(l1) <= TANGENCY_PHASE_TOL:
        return l2 > 0.0
    return l1 > 0.0


__all__ = [
    "Region",
    "HALF_PI",
    "THREE_HALF_PI",
    "nondimensionalize",
    "xi",
    "friction",
    "vector_field",
    "classify",
    "filippov_sliding_region",
    "sticking_leaf_kind",
    "lie_derivatives",
    "tangency",
    "forward_singular_set",
    "sticking_points_inward",
]
