# modules_regularization/stiff.py
"""
Жёсткое интегрирование регуляризованной системы и расчёты на его основе:
близость к решениям с трением покоя и предельный цикл залипания.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from config_package.constants import BranchPolicy, CriticalBranch
from config_package.settings import settings
from modules_common.errors import (
    ClosureFailureError,
    NoStickError,
    SingularSolutionError,
    StepFailureError,
)
from modules_common.pool import run_sweep
from modules_model.params import TWO_PI, Params, State
from modules_pws.integrator import Trajectory, integrate_stiction, is_regular
from modules_regularization.phi import RegParams
from modules_regularization.slow_fast import critical_yh, regularized_jacobian, regularized_rhs_array

log = logging.getLogger("stiction-lab.reg.stiff")

# шаг, ниже которого интегратор считается «схлопнувшимся» в слое
STEP_COLLAPSE_FACTOR = 1e-4


@dataclass
class RegTrajectory:
    """
    Траектория регуляризованной системы.

    Attributes:
        times: Узлы интегратора
        states: Состояния (N, 3); θ не приведена по модулю
        sol: Плотный выход solve_ivp
        min_step: Минимальный принятый шаг
        nfev: Число вычислений правой части
        t_events: Моменты событий (если заданы)
        warnings: Записанные предупреждения
    """

    times: np.ndarray
    states: np.ndarray
    sol: Any
    min_step: float
    nfev: int
    t_events: List[np.ndarray] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def states_at(self, ts: np.ndarray) -> np.ndarray:
        return np.asarray(self.sol(np.asarray(ts, dtype=float))).T

    def state_at(self, t: float) -> State:
        return State.from_array(self.sol(t))

    @property
    def end_state(self) -> State:
        return State.from_array(self.states[-1])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])


def stiff_integrate(
    z0: State,
    T: float,
    p: Params,
    rp: RegParams,
    tol: Optional[float] = None,
    events: Optional[Sequence[Any]] = None,
    atol: Optional[float] = None,
) -> RegTrajectory:
    """
    Неявное адаптивное интегрирование (Radau) с аналитическим якобианом.

    Args:
        z0: Начальная точка
        T: Время интегрирования (отрицательное — назад по времени)
        p: Параметры модели
        rp: Параметры регуляризации
        tol: Относительный допуск (по умолчанию STIFF_RTOL)
        events: События solve_ivp
        atol: Абсолютный допуск (по умолчанию STIFF_ATOL)

    Raises:
        StepFailureError: если интегратор не дошёл до T
    """
    rtol = settings.stiff_rtol if tol is None else tol
    atol = settings.stiff_atol if atol is None else atol
    res = solve_ivp(
        regularized_rhs_array,
        (0.0, T),
        z0.as_array(),
        method="Radau",
        jac=regularized_jacobian,
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=events,
        args=(p, rp),
    )
    if res.status == -1:
        raise StepFailureError(
            f"stiff integration failed at t={res.t[-1]:.6g}: {res.message}",
            {"t_reached": float(res.t[-1]), "T": T, "eps": rp.eps, "state": res.y[:, -1].tolist()},
        )

    steps = np.abs(np.diff(res.t))
    # последний шаг обрезается по T и не показателен
    inner = steps[:-1] if steps.size > 2 else steps
    min_step = float(inner.min()) if inner.size else abs(T)
    warnings: List[str] = []
    if min_step < rp.eps * STEP_COLLAPSE_FACTOR:
        msg = f"step size dropped to {min_step:.3e} (< eps*{STEP_COLLAPSE_FACTOR:g}) at eps={rp.eps:g}"
        log.warning(msg)
        warnings.append(msg)
    log.debug(f"Radau: {res.t.size} steps, nfev={res.nfev}, min step {min_step:.3e}")
    return RegTrajectory(
        times=res.t,
        states=res.y.T.copy(),
        sol=res.sol,
        min_step=min_step,
        nfev=int(res.nfev),
        t_events=list(res.t_events) if res.t_events is not None else [],
        warnings=warnings,
    )


def on_attracting_manifold(x: float, theta: float, p: Params, rp: RegParams) -> State:
    """Точка на C_a: y = ε φ_a⁻¹(−ξ/μ_d)."""
    v = p.gamma2 * x + math.sin(theta)
    return State(x, rp.eps * critical_yh(v, p, rp, CriticalBranch.C_A), theta)


# ── Близость к решениям с трением покоя ─────────────────────────────────────


def trajectory_distance(reg: RegTrajectory, pws: Trajectory, ts: np.ndarray) -> float:
    """sup по сетке расстояния в (x, y) между регуляризованным и кусочно-гладким решением."""
    a = reg.states_at(ts)
    b = pws.states_at(ts)
    return float(np.max(np.hypot(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1])))


@dataclass
class ClosenessStudy:
    """Таблица d(ε) и наклон в логарифмических осях."""

    eps: List[float]
    distances: List[float]
    slope: float
    intercept: float
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "distances": self.distances,
            "slope": self.slope,
            "intercept": self.intercept,
        }


def _closeness_item(item: Dict[str, Any]) -> Dict[str, Any]:
    z0: State = item["z0"]
    T: float = item["T"]
    p: Params = item["p"]
    rp: RegParams = item["rp"]
    pws = integrate_stiction(z0, T, BranchPolicy.STICK_FIRST, p)
    assert isinstance(pws, Trajectory)
    reg = stiff_integrate(z0, T, p, rp, tol=item.get("tol"))
    n = max(2001, int(math.ceil(T / 1e-3)) + 1)
    ts = np.linspace(0.0, T, n)
    return {"eps": rp.eps, "distance": trajectory_distance(reg, pws, ts), "warnings": reg.warnings}


def closeness_study(
    z0: State,
    T: float,
    p: Params,
    rp_template: RegParams,
    eps_list: Sequence[float],
    workers: int = 1,
    shard_dir: Optional[str] = None,
    tol: Optional[float] = None,
) -> ClosenessStudy:
    """
    sup-расстояние d(ε) между регуляризованным и кусочно-гладким решениями из z0.

    Raises:
        SingularSolutionError: если решение из z0 проходит через точку неединственности
    """
    pws = integrate_stiction(z0, T, BranchPolicy.STICK_FIRST, p)
    assert isinstance(pws, Trajectory)
    if not is_regular(pws):
        raise SingularSolutionError(
            "closeness is undefined for singular stiction solutions", {"z0": z0.as_tuple(), "T": T}
        )
    items = [{"z0": z0, "T": T, "p": p, "rp": rp_template.with_eps(e), "tol": tol} for e in eps_list]
    outcomes = run_sweep(_closeness_item, items, workers=workers, shard_dir=shard_dir)
    eps_out: List[float] = []
    dist: List[float] = []
    warnings: List[str] = []
    for o in outcomes:
        if not o.ok or o.result is None:
            raise StepFailureError(
                f"closeness run failed for eps={items[o.index]['rp'].eps}",
                {"error": o.error},
            )
        eps_out.append(float(o.result["eps"]))
        dist.append(float(o.result["distance"]))
        warnings.extend(o.result.get("warnings") or [])
    if len(eps_out) >= 2 and all(d > 0 for d in dist):
        slope, intercept = np.polyfit(np.log(eps_out), np.log(dist), 1)
    else:
        slope, intercept = float("nan"), float("nan")
    log.info(f"closeness slope {slope:.4f} over eps={eps_out}")
    return ClosenessStudy(eps_out, dist, float(slope), float(intercept), warnings)


# ── Предельный цикл залипания ───────────────────────────────────────────────


@dataclass
class StickingCycle:
    """Неподвижная точка отображения Пуанкаре θ = 0 около S_{a,ε}."""

    x0: float
    y0: float
    multiplier: float
    residual: float
    trajectory: RegTrajectory

    def to_dict(self) -> Dict[str, Any]:
        return {"x0": self.x0, "y0": self.y0, "multiplier": self.multiplier, "residual": self.residual}


def sticking_limit_cycle(
    p: Params, rp: RegParams, tol: float = 1e-10, atol: Optional[float] = None
) -> StickingCycle:
    """
    2π-периодический цикл на S_{a,ε} через (x, θ) = (0, 0) + O(ε).

    Raises:
        NoStickError: при μ_s ≤ 1
        ClosureFailureError: если отображение не меняет знак на отрезке поиска
    """
    if p.mu_s <= 1.0:
        raise NoStickError(
            f"no periodic sticking for mu_s={p.mu_s} <= 1", {"mu_s": p.mu_s}
        )
    atol = rp.eps * tol if atol is None else atol

    def return_x(x0: float) -> float:
        traj = stiff_integrate(on_attracting_manifold(x0, 0.0, p, rp), TWO_PI, p, rp, tol=tol, atol=atol)
        return float(traj.states[-1, 0])

    half = 0.5 * (p.mu_s - 1.0) / p.gamma2

    def gap(x0: float) -> float:
        return return_x(x0) - x0

    g_lo, g_hi = gap(-half), gap(half)
    if g_lo * g_hi > 0.0:
        raise ClosureFailureError(
            "return map has no fixed point on the sticking leaf range", {"gap_lo": g_lo, "gap_hi": g_hi}
        )
    x_star = float(brentq(gap, -half, half, xtol=1e-14, rtol=1e-12))
    h = 0.05 * rp.eps
    mult = (return_x(x_star + h) - return_x(x_star - h)) / (2.0 * h)
    start = on_attracting_manifold(x_star, 0.0, p, rp)
    traj = stiff_integrate(start, TWO_PI, p, rp, tol=tol, atol=atol)
    residual = abs(float(traj.states[-1, 0]) - x_star)
    log.info(f"sticking cycle x0={x_star:.6e} multiplier={mult:.8f} at eps={rp.eps:g}")
    return StickingCycle(x0=x_star, y0=start.y, multiplier=float(mult), residual=residual, trajectory=traj)


__all__ = [
    "RegTrajectory",
    "stiff_integrate",
    "on_attracting_manifold",
    "trajectory_distance",
    "ClosenessStudy",
    "closeness_study",
    "StickingCycle",
    "sticking_limit_cycle",
]
