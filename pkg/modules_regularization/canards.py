# modules_regularization/canards.py
"""
Утки свёрнутого седла.

Сингулярные утки строятся на C₀ в параметризации по θ: вдоль C₀
ξ′ = Γŷ(ξ) + cos θ, θ′ = 1, где ŷ(ξ) — корень на нужной ветви. Истинная
утка идёт по C_a к седлу и уходит по C_r±, ложная — наоборот.
Максимальная утка при ε > 0 ищется бисекцией по x0 между решениями,
которые поворачивают (остаются на S_{a,ε}), и решениями, которые срываются.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from config_package.constants import CanardKind, CriticalBranch
from modules_common.errors import BranchNotApplicableError, NoIntersectionError
from modules_model.params import TWO_PI, Params, State
from modules_regularization.folds import CriticalPoint
from modules_regularization.phi import RegParams
from modules_regularization.slow_fast import critical_yh
from modules_regularization.stiff import RegTrajectory, on_attracting_manifold, stiff_integrate

log = logging.getLogger("stiction-lab.reg.canards")

CANARD_RTOL = 1e-11
CANARD_ATOL = 1e-12
JUMP_LEVEL = 1.5


@dataclass
class CanardSegment:
    """
    Участок утки в координатах (θ, ξ, ŷ).

    Attributes:
        kind: Тип утки
        theta, xi, yh: Выборка пути (θ возрастает)
        branches: Ветвь C₀ для каждой точки
        saddle: Свёрнутое седло
        direction: Собственный вектор седла в (ŷ, θ), вдоль которого проходит утка
        closure_gap: |ξ − ξ_s| после полного оборота по C_a (nan, если оборот не пройден)
        departure_theta: θ ухода с C_r± (край регуляризации или срыв)
    """

    kind: CanardKind
    theta: np.ndarray
    xi: np.ndarray
    yh: np.ndarray
    branches: List[CriticalBranch]
    saddle: CriticalPoint
    direction: Optional[np.ndarray] = None
    closure_gap: float = float("nan")
    departure_theta: float = float("nan")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "saddle": self.saddle.to_dict(),
            "samples": int(self.theta.size),
            "closure_gap": self.closure_gap,
            "departure_theta": self.departure_theta,
        }


def _saddle_geometry(saddle: CriticalPoint, p: Params) -> Tuple[int, CriticalBranch, float, float]:
    """Знак складки, ветвь C_r, уровни ξ противоположной складки и края регуляризации."""
    s = 1 if saddle.yh > 0 else -1
    r_branch = CriticalBranch.C_R_PLUS if s > 0 else CriticalBranch.C_R_MINUS
    return s, r_branch, s * p.mu_s, -s * p.mu_d


def _follow(
    theta_s: float,
    xi_s: float,
    span: float,
    branch: CriticalBranch,
    stop_level: float,
    p: Params,
    rp: RegParams,
    Gamma: float,
    n: int,
):
    """ξ(θ) вдоль ветви от седла на span по θ (знак span задаёт направление)."""

    def rhs(theta: float, u: np.ndarray) -> np.ndarray:
        return np.array([Gamma * critical_yh(u[0], p, rp, branch) + math.cos(theta)])

    def stop(theta: float, u: np.ndarray) -> float:
        return u[0] - stop_level

    stop.terminal = True  # type: ignore[attr-defined]
    res = solve_ivp(
        rhs,
        (theta_s, theta_s + span),
        [xi_s],
        method="DOP853",
        rtol=CANARD_RTOL,
        atol=CANARD_ATOL,
        dense_output=True,
        events=stop,
    )
    th_end = float(res.t[-1])
    ths = np.linspace(theta_s, th_end, n)
    xis = np.asarray(res.sol(ths))[0]
    yhs = np.array([critical_yh(v, p, rp, branch) for v in xis])
    reached_stop = bool(res.t_events and res.t_events[0].size)
    return ths, xis, yhs, th_end, reached_stop


def singular_canard(
    saddle: CriticalPoint, kind: CanardKind, p: Params, rp: RegParams, n: int = 400
) -> CanardSegment:
    """
    Сингулярная утка через свёрнутое седло.

    Args:
        saddle: Свёрнутое седло из folded_singularities
        kind: SINGULAR_VRAI (C_a → C_r±) или SINGULAR_FAUX (C_r± → C_a)
        p: Параметры модели
        rp: Параметры регуляризации
        n: Число точек выборки на каждом участке

    Raises:
        BranchNotApplicableError: если точка не седло или kind не сингулярный
    """
    if not saddle.is_saddle:
        raise BranchNotApplicableError(
            f"canards exist at folded saddles only, got {saddle.klass.value}", {"theta": saddle.theta}
        )
    if kind not in (CanardKind.SINGULAR_VRAI, CanardKind.SINGULAR_FAUX):
        raise BranchNotApplicableError(f"{kind.value} is not a singular canard", {})

    _, r_branch, other_fold, edge = _saddle_geometry(saddle, p)
    th_s, xi_s, G = saddle.theta, saddle.xi, saddle.Gamma
    # до седла по времени идёт C_a у истинной утки и C_r у ложной
    before, after = (
        (CriticalBranch.C_A, r_branch) if kind is CanardKind.SINGULAR_VRAI else (r_branch, CriticalBranch.C_A)
    )
    stop_before = other_fold if before is CriticalBranch.C_A else edge
    stop_after = other_fold if after is CriticalBranch.C_A else edge

    th_b, xi_b, yh_b, end_b, stopped_b = _follow(th_s, xi_s, -TWO_PI, before, stop_before, p, rp, G, n)
    th_a, xi_a, yh_a, end_a, stopped_a = _follow(th_s, xi_s, TWO_PI, after, stop_after, p, rp, G, n)

    # полный оборот по C_a возвращает на складку
    closure = float("nan")
    if before is CriticalBranch.C_A and not stopped_b:
        closure = abs(float(xi_b[-1]) - xi_s)
    elif after is CriticalBranch.C_A and not stopped_a:
        closure = abs(float(xi_a[-1]) - xi_s)

    theta = np.concatenate([th_b[::-1], th_a[1:]])
    xis = np.concatenate([xi_b[::-1], xi_a[1:]])
    yhs = np.concatenate([yh_b[::-1], yh_a[1:]])
    branches = [before] * th_b.size + [after] * (th_a.size - 1)

    # столбцы упорядочены по убыванию Re λ: [неустойчивый, устойчивый]
    vec = saddle.eigenvectors[:, 1 if kind is CanardKind.SINGULAR_VRAI else 0]
    departure = end_a if after is not CriticalBranch.C_A else th_s
    log.debug(f"{kind.value} canard at theta_s={th_s:.6f}: closure {closure:.3e}, departure {departure:.6f}")
    return CanardSegment(
        kind=kind,
        theta=theta,
        xi=xis,
        yh=yhs,
        branches=branches,
        saddle=saddle,
        direction=np.real(vec),
        closure_gap=closure,
        departure_theta=departure,
    )


# ── Максимальная утка ───────────────────────────────────────────────────────


@dataclass
class MaximalCanard:
    """
    Максимальная утка при ε > 0.

    Attributes:
        x0: Начальная координата на S_{a,ε} при θ0 = θ_s − π
        forward: Участок S_{a,ε} → S_{r,ε} (последнее поворачивающее решение)
        backward: Участок S_{r,ε}, полученный обратным интегрированием до сечения складки
        gap: Рассогласование прямого и обратного участков на сечении θ = θ_s (в единицах ŷ)
        bracket: Ширина итоговой скобки бисекции
    """

    x0: float
    forward: CanardSegment
    backward: CanardSegment
    gap: float
    bracket: float
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x0": self.x0,
            "gap": self.gap,
            "bracket": self.bracket,
            "departure_theta": self.forward.departure_theta,
            "forward": self.forward.to_dict(),
            "backward": self.backward.to_dict(),
        }


def _segment_from(
    traj: RegTrajectory, ts: np.ndarray, kind: CanardKind, saddle: CriticalPoint, p: Params, rp: RegParams
) -> CanardSegment:
    z = traj.states_at(ts)
    yh = z[:, 1] / rp.eps
    xi = p.gamma2 * z[:, 0] + np.sin(z[:, 2])
    order = np.argsort(z[:, 2])
    return CanardSegment(
        kind=kind,
        theta=z[order, 2],
        xi=xi[order],
        yh=yh[order],
        branches=[rp.phi.branch_of(float(v)) for v in yh[order]],
        saddle=saddle,
    )


def maximal_canard(
    saddle: CriticalPoint,
    p: Params,
    rp: RegParams,
    tol: float = 1e-9,
    max_iter: int = 60,
) -> MaximalCanard:
    """
    Максимальная утка около свёрнутого седла при ε > 0.

    Прямое интегрирование с S_{a,ε} и бисекция по x0 между поворотом и срывом;
    затем обратное интегрирование с C_r± до сечения складки.

    Raises:
        NoIntersectionError: если скобка поворот/срыв не найдена
    """
    if not saddle.is_saddle:
        raise BranchNotApplicableError(
            f"canards exist at folded saddles only, got {saddle.klass.value}", {"theta": saddle.theta}
        )
    s, r_branch, _, edge = _saddle_geometry(saddle, p)
    th_s = saddle.theta
    th0 = th_s - math.pi
    x_s = saddle.x(p)

    # конец сингулярной утки на C_r: ξ доходит до края регуляризации
    ref = singular_canard(saddle, CanardKind.SINGULAR_VRAI, p, rp, n=50)
    th_edge = ref.departure_theta
    T = (th_edge - th0) + 0.5

    def jump(t: float, u: np.ndarray, *_: Any) -> float:
        return u[1] - s * JUMP_LEVEL * rp.eps

    jump.terminal = True  # type: ignore[attr-defined]
    jump.direction = s  # type: ignore[attr-defined]

    def run(x0: float) -> Tuple[bool, RegTrajectory]:
        traj = stiff_integrate(on_attracting_manifold(x0, th0, p, rp), T, p, rp, tol=tol, atol=rp.eps * tol, events=[jump])
        jumped = bool(traj.t_events and traj.t_events[0].size)
        return jumped, traj

    # срыв со стороны, где |ξ| переходит μ_s
    w = 0.25 * (p.mu_s - p.mu_d) / p.gamma2
    turn_x, jump_x = x_s + s * w, x_s - s * w
    j_turn, traj_turn = run(turn_x)
    j_jump, _ = run(jump_x)
    if j_turn or not j_jump:
        raise NoIntersectionError(
            "no turn/jump bracket around the singular canard leaf",
            {"x_turn": turn_x, "x_jump": jump_x, "turn_jumped": j_turn, "jump_jumped": j_jump},
        )
    for _ in range(max_iter):
        if abs(jump_x - turn_x) <= 1e-14 * max(1.0, abs(x_s)):
            break
        mid = 0.5 * (turn_x + jump_x)
        jumped, traj = run(mid)
        if jumped:
            jump_x = mid
        else:
            turn_x, traj_turn = mid, traj

    ts = np.linspace(0.0, traj_turn.t_end, 800)
    forward = _segment_from(traj_turn, ts, CanardKind.MAXIMAL_FORWARD, saddle, p, rp)
    # уход с S_{r,ε}: наибольшее отклонение ŷ в сторону C_r
    k = int(np.argmax(s * forward.yh))
    forward.departure_theta = float(forward.theta[k])

    # обратный ход с C_r из середины сингулярного участка
    th_m = 0.5 * (th_s + th_edge)
    zm = traj_turn.state_at(th_m - th0)
    v = p.gamma2 * zm.x + math.sin(th_m)
    start = State(zm.x, rp.eps * critical_yh(v, p, rp, r_branch), th_m)
    back = stiff_integrate(start, -(th_m - th_s), p, rp, tol=tol, atol=rp.eps * tol)
    tb = np.linspace(0.0, back.t_end, 400)
    backward = _segment_from(back, tb, CanardKind.MAXIMAL_BACKWARD, saddle, p, rp)
    backward.departure_theta = th_m

    y_fwd = traj_turn.state_at(th_s - th0).y
    y_bwd = back.end_state.y
    gap = abs(y_fwd - y_bwd) / rp.eps
    warnings = traj_turn.warnings + back.warnings
    log.info(f"maximal canard x0={turn_x:.12g}, departure theta={forward.departure_theta:.4f}, gap={gap:.3e}")
    return MaximalCanard(
        x0=turn_x,
        forward=forward,
        backward=backward,
        gap=gap,
        bracket=abs(jump_x - turn_x),
        warnings=warnings,
    )


__all__ = ["CanardSegment", "MaximalCanard", "singular_canard", "maximal_canard"]
