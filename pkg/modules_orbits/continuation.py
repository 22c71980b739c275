# modules_orbits/continuation.py
"""
Продолжение семейств орбит скольжения-залипания по γ.

Естественный параметр с адаптивным шагом и секущим предиктором в (θ0, θ*).
Семейства Π₀^l (γ < 1) и Π₀^r (γ > 1) разделены резонансом γ = 1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config_package.constants import BranchLabel, TerminationReason
from config_package.settings import settings
from modules_common.errors import (
    DegenerateTransitionError,
    NewtonDivergenceError,
    ResonanceGuardError,
)
from modules_model.params import Params
from modules_orbits.floquet import FloquetData, floquet_discontinuous
from modules_orbits.slipstick import SlipStickSolution, seed_slipstick, solve_slipstick
from modules_pws.slip_flow import in_resonance_band

log = logging.getLogger("stiction-lab.orbits.continuation")


class StepPolicy(BaseModel):
    """Управление шагом продолжения."""

    model_config = ConfigDict(frozen=True)

    h0: float = Field(default=0.02, gt=0)
    h_min: float = Field(default=1e-6, gt=0)
    h_max: float = Field(default=0.25, gt=0)
    grow: float = Field(default=1.5, gt=1)
    shrink: float = Field(default=0.5, gt=0, lt=1)
    max_steps: int = Field(default=5000, gt=0)
    # наибольший допустимый скачок (θ0, θ*) между соседними орбитами
    max_jump: float = Field(default=0.2, gt=0)
    # пороги границ семейства
    theta_star_min: float = Field(default=1e-3, gt=0)
    tangency_margin: float = Field(default=1e-3, gt=0)
    # относительный шаг в γ (шаг h умножается на γ при relative=True)
    relative: bool = True


# ── Семейства орбит ─────────────────────────────────────────────────────────


@dataclass
class OrbitPoint:
    """
    Орбита семейства.

    Attributes:
        gamma: Значение параметра
        orbit: SlipStickSolution или RegularizedOrbit
        floquet: Мультипликаторы (None, если не вычислены)
        max_abs_y: Максимальная амплитуда скорости
        label: Метка сегмента семейства
    """

    gamma: float
    orbit: Any
    floquet: Optional[FloquetData]
    max_abs_y: float
    label: Optional[BranchLabel] = None


@dataclass
class OrbitBranch:
    """
    Упорядоченное семейство орбит.

    Attributes:
        points: Орбиты в порядке продолжения
        label: Метка семейства целиком (None, если метки по точкам)
        terminations: Причины остановки по концам ("start", "end")
        folds: Индексы точек, после которых γ меняет направление
        fold_gammas: Оценки γ в складках
    """

    points: List[OrbitPoint] = field(default_factory=list)
    label: Optional[BranchLabel] = None
    terminations: Dict[str, TerminationReason] = field(default_factory=dict)
    folds: List[int] = field(default_factory=list)
    fold_gammas: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([pt.gamma for pt in self.points])

    @property
    def gamma_range(self) -> Tuple[float, float]:
        g = self.gammas
        return (float(g.min()), float(g.max())) if g.size else (math.nan, math.nan)

    def labelled(self, label: BranchLabel) -> List[OrbitPoint]:
        return [pt for pt in self.points if (pt.label or self.label) is label]

    def summary(self) -> Dict[str, Any]:
        lo, hi = self.gamma_range
        counts: Dict[str, int] = {}
        for pt in self.points:
            key = (pt.label or self.label).value if (pt.label or self.label) else "unlabelled"
            counts[key] = counts.get(key, 0) + 1
        return {
            "label": self.label.value if self.label else None,
            "points": len(self.points),
            "gamma_min": lo,
            "gamma_max": hi,
            "terminations": {k: v.value for k, v in self.terminations.items()},
            "fold_gammas": list(self.fold_gammas),
            "segments": counts,
        }


# ── Продолжение Π₀ ──────────────────────────────────────────────────────────


def _point(sol: SlipStickSolution, label: BranchLabel) -> OrbitPoint:
    try:
        fl: Optional[FloquetData] = floquet_discontinuous(sol)
    except DegenerateTransitionError as e:
        log.warning(f"no multipliers at gamma={sol.gamma:.6g}: {e.message}")
        fl = None
    return OrbitPoint(gamma=sol.gamma, orbit=sol, floquet=fl, max_abs_y=sol.max_abs_y(), label=label)


def _boundary_reason(sol: SlipStickSolution, policy: StepPolicy, slack: float = 1.0) -> Optional[TerminationReason]:
    if sol.theta_star <= policy.theta_star_min * slack:
        return TerminationReason.PURE_SLIP
    if sol.theta_star >= math.pi - policy.theta_star_min * slack:
        return TerminationReason.THETA_STAR_PI
    if math.cos(sol.theta0) <= policy.tangency_margin * slack:
        return TerminationReason.TANGENCY
    return None


def _underflow_reason(sol: SlipStickSolution, policy: StepPolicy, next_gamma: float) -> TerminationReason:
    if in_resonance_band(sol.params.with_gamma(next_gamma)):
        return TerminationReason.RESONANCE
    near = _boundary_reason(sol, policy, slack=50.0)
    if near is not None:
        return near
    return TerminationReason.STEP_UNDERFLOW


def _continue_one_way(
    seed: SlipStickSolution,
    gamma_end: float,
    policy: StepPolicy,
    p: Params,
    label: BranchLabel,
) -> Tuple[List[SlipStickSolution], TerminationReason]:
    """Продолжение от seed до gamma_end (в любую сторону)."""
    direction = 1.0 if gamma_end > seed.gamma else -1.0
    sols = [seed]
    h = policy.h0
    u_prev: Optional[np.ndarray] = None
    g_prev: Optional[float] = None

    for _ in range(policy.max_steps):
        cur = sols[-1]
        reason = _boundary_reason(cur, policy)
        if reason is not None:
            return sols, reason
        remaining = abs(gamma_end - cur.gamma)
        if remaining <= 1e-14:
            return sols, TerminationReason.REACHED_END

        step = min(h * (cur.gamma if policy.relative else 1.0), remaining)
        g_next = cur.gamma + direction * step
        u_cur = np.array([cur.theta0, cur.theta_star])
        if u_prev is not None and g_prev is not None and g_prev != cur.gamma:
            guess = u_cur + (u_cur - u_prev) * (g_next - cur.gamma) / (cur.gamma - g_prev)
        else:
            guess = u_cur

        accepted: Optional[SlipStickSolution] = None
        if not in_resonance_band(p.with_gamma(g_next)):
            try:
                cand = solve_slipstick(g_next, (float(guess[0]), float(guess[1])), p, warn=False)
                jump = float(np.max(np.abs(np.array([cand.theta0, cand.theta_star]) - u_cur)))
                if cand.admissible and jump <= policy.max_jump:
                    accepted = cand
            except (NewtonDivergenceError, ResonanceGuardError) as e:
                log.debug(f"{label.value}: step to gamma={g_next:.8g} failed ({e})")

        if accepted is None:
            h *= policy.shrink
            if h * (cur.gamma if policy.relative else 1.0) < policy.h_min:
                return sols, _underflow_reason(cur, policy, g_next)
            continue

        u_prev, g_prev = u_cur, cur.gamma
        sols.append(accepted)
        h = min(h * policy.grow, policy.h_max)
    return sols, TerminationReason.MAX_STEPS


def continue_branch_pws(
    gamma_start: float,
    gamma_end: float,
    policy: Optional[StepPolicy],
    p: Params,
    seed: Optional[SlipStickSolution] = None,
    label: Optional[BranchLabel] = None,
) -> OrbitBranch:
    """
    Семейство Π₀ от gamma_start к gamma_end.

    Продолжение останавливается на концах семейства (θ* → 0, θ* → π,
    θ0 → π/2), у резонансной полосы или на конце диапазона; причины
    записываются в terminations, а не бросаются.

    Args:
        gamma_start: Начальное γ (там нужен seed или он ищется перебором)
        gamma_end: Конечное γ
        policy: Управление шагом
        p: Параметры
        seed: Решение при gamma_start
        label: Метка семейства (по умолчанию по стороне от γ = 1)

    Raises:
        NewtonDivergenceError: если при gamma_start нет допустимого решения
    """
    policy = policy or StepPolicy()
    label = label or (BranchLabel.PI0_LEFT if gamma_start < 1.0 else BranchLabel.PI0_RIGHT)
    if seed is None:
        found = seed_slipstick(gamma_start, p)
        if not found:
            raise NewtonDivergenceError(
                f"no admissible slip-stick orbit at gamma={gamma_start}", {"gamma": gamma_start}
            )
        seed = found[0]
    sols, reason = _continue_one_way(seed, gamma_end, policy, p, label)
    branch = OrbitBranch(
        points=[_point(s, label) for s in sols],
        label=label,
        terminations={"start": TerminationReason.REACHED_END, "end": reason},
    )
    log.info(
        f"{label.value}: {len(branch)} orbits, gamma {branch.gamma_range[0]:.6g}..{branch.gamma_range[1]:.6g}, "
        f"stopped by {reason.value}"
    )
    return branch


def _find_seed(lo: float, hi: float, p: Params, tries: int) -> Optional[SlipStickSolution]:
    """Первое допустимое решение на геометрической сетке γ внутри (lo, hi)."""
    grid = np.geomspace(lo, hi, tries + 2)[1:-1]
    # середина диапазона раньше краёв
    order = np.argsort(np.abs(np.log(grid) - 0.5 * (math.log(lo) + math.log(hi))))
    for g in grid[order]:
        g = float(g)
        if in_resonance_band(p.with_gamma(g)):
            continue
        try:
            found = seed_slipstick(g, p)
        except ResonanceGuardError:
            continue
        if found:
            return found[0]
    return None


def trace_pws_branches(
    gamma_range: Tuple[float, float],
    p: Params,
    policy: Optional[StepPolicy] = None,
    tries: int = 9,
) -> List[OrbitBranch]:
    """
    Семейства Π₀^l и/или Π₀^r внутри диапазона γ.

    Диапазон делится резонансом γ = 1; в каждой части решение ищется
    перебором и продолжается в обе стороны.
    """
    policy = policy or StepPolicy()
    lo, hi = sorted(gamma_range)
    band = settings.resonance_band
    parts: List[Tuple[float, float, BranchLabel]] = []
    if lo < 1.0 - band:
        parts.append((lo, min(hi, 1.0 - band), BranchLabel.PI0_LEFT))
    if hi > 1.0 + band:
        parts.append((max(lo, 1.0 + band), hi, BranchLabel.PI0_RIGHT))

    branches: List[OrbitBranch] = []
    for a, b, label in parts:
        seed = _find_seed(a, b, p, tries)
        if seed is None:
            log.info(f"{label.value}: no slip-stick orbit found in gamma ({a:.6g}, {b:.6g})")
            continue
        down, reason_down = _continue_one_way(seed, a, policy, p, label)
        up, reason_up = _continue_one_way(seed, b, policy, p, label)
        sols = list(reversed(down)) + up[1:]
        branch = OrbitBranch(
            points=[_point(s, label) for s in sols],
            label=label,
            terminations={"start": reason_down, "end": reason_up},
        )
        log.info(
            f"{label.value}: {len(branch)} orbits on gamma {branch.gamma_range[0]:.6g}..{branch.gamma_range[1]:.6g} "
            f"({reason_down.value} / {reason_up.value})"
        )
        branches.append(branch)
    return branches


__all__ = [
    "StepPolicy",
    "OrbitPoint",
    "OrbitBranch",
    "continue_branch_pws",
    "trace_pws_branches",
]
