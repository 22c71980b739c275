# modules_orbits/slipstick.py
"""
Симметричные периодические орбиты скольжения-залипания разрывной системы.

Нижняя половина орбиты: срыв на ∂Σ_c⁻ в точке z0 = (x0, 0, θ0), дуга скольжения
с y < 0 длительностью π − θ*, приземление в (−x0, 0, θ0 + π − θ*) и залипание
длительностью θ* до ∂Σ_c⁺ в S(z0) = (−x0, 0, θ0 + π). Верхняя половина — образ
нижней под симметрией S.

Неизвестные (θ0, θ*); x0 исключается условием ξ(x0, θ0) = μ_s.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from config_package.constants import BranchPolicy, EventKind, RegionLabel
from config_package.settings import settings
from modules_common.errors import ClosureFailureError, NewtonDivergenceError, NoStickError
from modules_common.newton import newton_solve
from modules_model.params import TWO_PI, Params, State
from modules_pws.events import Event
from modules_pws.integrator import Trajectory, integrate_stiction
from modules_pws.slip_flow import SlipArc, in_resonance_band, slip_flow_closed_form, slip_flow_jacobian

log = logging.getLogger("stiction-lab.orbits")

# Якобиан S: постоянная матрица
SYMMETRY_JACOBIAN = np.diag([-1.0, -1.0, 1.0])

CLOSURE_TOL = 1e-9
# запас от границ допустимости
ADMISSIBLE_MARGIN = 1e-9
# шаг проверки внутренних точек дуг
_CHECK_POINTS = 4001


def symmetry_map(z: State) -> State:
    """S(x, y, θ) = (−x, −y, θ + π)."""
    return State(-z.x, -z.y, z.theta + math.pi)


# ── Решение ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Admissibility:
    """
    Проверки допустимости найденного решения.

    Attributes:
        slip_below: y < 0 строго внутри дуги скольжения
        landing_sticks: приземление внутри Σ_s (|ξ| < μ_s)
        stick_interior: дуга залипания не выходит на ∂Σ_c± до θ*
        exit_transversal: срыв трансверсален (cos θ0 > 0)
    """

    slip_below: bool
    landing_sticks: bool
    stick_interior: bool
    exit_transversal: bool

    @property
    def ok(self) -> bool:
        return self.slip_below and self.landing_sticks and self.stick_interior and self.exit_transversal

    def failed(self) -> List[str]:
        return [name for name, v in self.to_dict().items() if not v]

    def to_dict(self) -> Dict[str, bool]:
        return {
            "slip_below": self.slip_below,
            "landing_sticks": self.landing_sticks,
            "stick_interior": self.stick_interior,
            "exit_transversal": self.exit_transversal,
        }


@dataclass(frozen=True)
class SlipStickSolution:
    """
    Симметричная орбита скольжения-залипания.

    Attributes:
        params: Параметры (γ входит в них)
        theta0: Фаза срыва на ∂Σ_c⁻
        theta_star: Длительность залипания, (0, π)
        x0: Положение срыва, (μ_s − sin θ0)/γ²
        residual_norm: Норма невязки условий
        admissibility: Проверки допустимости
    """

    params: Params
    theta0: float
    theta_star: float
    x0: float
    residual_norm: float
    admissibility: Admissibility

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def admissible(self) -> bool:
        return self.admissibility.ok

    @property
    def slip_time(self) -> float:
        return math.pi - self.theta_star

    @property
    def z0(self) -> State:
        return State(self.x0, 0.0, self.theta0)

    @property
    def landing(self) -> State:
        return State(-self.x0, 0.0, self.theta0 + self.slip_time)

    def slip_arc(self) -> SlipArc:
        return SlipArc.build(self.z0, -1, self.params)

    def max_abs_y(self) -> float:
        """Максимум |y| на орбите (достигается на дуге скольжения)."""
        arc = self.slip_arc()
        ts = np.linspace(0.0, self.slip_time, 2001)
        _, y = arc.xy(ts)
        j = int(np.argmin(y))
        lo, hi = ts[max(j - 1, 0)], ts[min(j + 1, ts.size - 1)]
        if hi <= lo:
            return float(-y[j])
        res = minimize_scalar(lambda t: float(arc.xy(np.array(t))[1]), bounds=(lo, hi), method="bounded")
        return float(max(-y[j], -res.fun))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "theta0": self.theta0,
            "theta_star": self.theta_star,
            "x0": self.x0,
            "residual_norm": self.residual_norm,
            "admissible": self.admissible,
            "admissibility": self.admissibility.to_dict(),
        }


def onset_position(theta0: float, p: Params) -> float:
    """x0 из условия ξ(x0, θ0) = μ_s."""
    return (p.mu_s - math.sin(theta0)) / p.gamma2


def slipstick_residual(u: np.ndarray, p: Params) -> Tuple[np.ndarray, np.ndarray]:
    """
    Невязки (x^slip(π − θ*) + x0, y^slip(π − θ*)) и их якобиан по (θ0, θ*).

    Третье условие (фаза приземления π − θ* + θ0) выполняется тождественно.
    """
    th0, ths = float(u[0]), float(u[1])
    t_s = math.pi - ths
    if t_s < 0.0:
        raise ValueError(f"theta_star={ths} exceeds pi")
    x0 = onset_position(th0, p)
    z0 = State(x0, 0.0, th0)
    z1 = slip_flow_closed_form(z0, -1, p, t_s)
    F = np.array([z1.x + x0, z1.y])

    dx0 = -math.cos(th0) / p.gamma2
    Jf = slip_flow_jacobian(z0, -1, p, t_s)
    dz_dth0 = Jf @ np.array([dx0, 0.0, 1.0])
    # производная по длительности дуги равна полю в конце дуги
    ydot = -(p.gamma2 * z1.x + math.sin(th0 + t_s)) + p.mu_d
    J = np.array(
        [
            [dz_dth0[0] + dx0, -z1.y],
            [dz_dth0[1], -ydot],
        ]
    )
    return F, J


def check_admissibility(theta0: float, theta_star: float, p: Params) -> Admissibility:
    """Проверки допустимости кандидата (θ0, θ*)."""
    x0 = onset_position(theta0, p)
    t_s = math.pi - theta_star
    arc = SlipArc.build(State(x0, 0.0, theta0), -1, p)

    slip_below = False
    if 0.0 < t_s:
        ts = np.linspace(0.0, t_s, _CHECK_POINTS)[1:-1]
        _, y = arc.xy(ts)
        slip_below = bool(np.all(y < 0.0))

    # на залипании при x = −x0: ξ(θ) = sin θ0 + sin θ − μ_s
    th1 = theta0 + t_s
    xi_land = math.sin(theta0) + math.sin(th1) - p.mu_s
    landing_sticks = abs(xi_land) < p.mu_s - ADMISSIBLE_MARGIN

    stick_interior = False
    if theta_star > 0.0:
        th = np.linspace(th1, theta0 + math.pi, _CHECK_POINTS)[:-1]
        s = math.sin(theta0) + np.sin(th)
        stick_interior = bool(np.all(s > 0.0) and np.all(s < 2.0 * p.mu_s - ADMISSIBLE_MARGIN))

    exit_transversal = math.cos(theta0) > ADMISSIBLE_MARGIN
    return Admissibility(slip_below, landing_sticks, stick_interior, exit_transversal)


def solve_slipstick(
    gamma: float,
    guess: Tuple[float, float],
    p: Params,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    step_limit: Optional[float] = 0.25,
    warn: bool = True,
) -> SlipStickSolution:
    """
    Решает условия симметричной орбиты скольжения-залипания методом Ньютона.

    Args:
        gamma: Отношение частот
        guess: Начальное приближение (θ0, θ*)
        p: Параметры (γ берётся из аргумента gamma)
        tol: Порог невязки (по умолчанию NEWTON_TOL)
        max_iter: Максимум итераций (по умолчанию NEWTON_MAX_ITER)
        step_limit: Ограничение шага Ньютона
        warn: Предупреждать о недопустимом решении

    Returns:
        SlipStickSolution; недопустимые решения возвращаются с флагами и предупреждением

    Raises:
        NoStickError: при μ_s ≤ 1
        ResonanceGuardError: если γ внутри резонансной полосы
        NewtonDivergenceError: если Ньютон не сошёлся
    """
    if p.mu_s <= 1.0:
        raise NoStickError(f"slip-stick orbits need mu_s > 1, got {p.mu_s}", {"mu_s": p.mu_s})
    pg = p.with_gamma(gamma)
    tol = settings.newton_tol if tol is None else tol
    max_iter = settings.newton_max_iter if max_iter is None else max_iter

    res = newton_solve(
        lambda u: slipstick_residual(u, pg),
        np.array(guess, dtype=float),
        tol=tol,
        max_iter=max_iter,
        label=f"slipstick(gamma={gamma:.6g})",
        step_limit=step_limit,
    )
    th0 = math.remainder(float(res.x[0]), TWO_PI)
    ths = float(res.x[1])
    if not 0.0 < ths < math.pi:
        raise NewtonDivergenceError(
            f"theta_star={ths:.6g} left (0, pi) at gamma={gamma}", {"gamma": gamma, "x": res.x.tolist()}
        )
    adm = check_admissibility(th0, ths, pg)
    sol = SlipStickSolution(
        params=pg,
        theta0=th0,
        theta_star=ths,
        x0=onset_position(th0, pg),
        residual_norm=res.residual_norm,
        admissibility=adm,
    )
    if warn and not adm.ok:
        log.warning(f"inadmissible slip-stick solution at gamma={gamma:.6g}: {', '.join(adm.failed())}")
    return sol


def _residual_norm_grid(gamma: float, p: Params, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Норма невязок на сетке θ0 ∈ (−π/2, π/2), θ* ∈ (0, π)."""
    pg = p.with_gamma(gamma)
    th0 = np.linspace(-0.5 * math.pi, 0.5 * math.pi, n + 2)[1:-1]
    ths = np.linspace(0.0, math.pi, n + 2)[1:-1]
    norms = np.empty((n, n))
    for i, a in enumerate(th0):
        arc = SlipArc.build(State(onset_position(float(a), pg), 0.0, float(a)), -1, pg)
        x, y = arc.xy(math.pi - ths)
        norms[i] = np.hypot(x + arc.z0.x, y)
    return th0, ths, norms


def seed_slipstick(gamma: float, p: Params, n: Optional[int] = None, keep: int = 12) -> List[SlipStickSolution]:
    """
    Все допустимые решения при данном γ: перебор сетки (θ0, θ*) и уточнение Ньютоном.

    Сетка сгущается с ростом γ, так как дуга скольжения длится порядка π/γ.
    Кандидатами служат локальные минимумы нормы невязки и приближение
    жёсткого тела θ0 ≈ arcsin μ_d, θ* ≈ π − π/γ.

    Returns:
        Допустимые решения, упорядоченные по θ0 (может быть пусто)
    """
    if p.mu_s <= 1.0:
        raise NoStickError(f"slip-stick orbits need mu_s > 1, got {p.mu_s}", {"mu_s": p.mu_s})
    n = n or max(48, int(8 * gamma))
    th0, ths, norms = _residual_norm_grid(gamma, p, n)

    padded = np.pad(norms, 1, mode="constant", constant_values=np.inf)
    centre = padded[1:-1, 1:-1]
    is_min = np.ones_like(centre, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= centre <= padded[1 + di : n + 1 + di, 1 + dj : n + 1 + dj]
    idx = np.argwhere(is_min)
    order = np.argsort(norms[is_min])[:keep]
    guesses = [(float(th0[i]), float(ths[j])) for i, j in idx[order]]
    if gamma > 1.0:
        guesses.append((math.asin(min(p.mu_d, 1.0)), math.pi - math.pi / gamma))

    found: List[SlipStickSolution] = []
    for g in guesses:
        try:
            sol = solve_slipstick(gamma, g, p, warn=False)
        except NewtonDivergenceError:
            continue
        if not sol.admissible:
            continue
        if any(abs(sol.theta0 - s.theta0) < 1e-7 and abs(sol.theta_star - s.theta_star) < 1e-7 for s in found):
            continue
        found.append(sol)
    found.sort(key=lambda s: s.theta0)
    log.debug(f"seed_slipstick(gamma={gamma:.6g}): {len(found)} admissible solutions from {len(guesses)} guesses")
    return found


# ── Полная орбита ───────────────────────────────────────────────────────────


def assemble_full_orbit(sol: SlipStickSolution, p: Optional[Params] = None) -> Trajectory:
    """
    Орбита за период 2π, начиная со срыва в z0.

    Орбита строится событийным интегратором из z0, так что события и дуги
    получаются тем же путём, что и у любого решения с трением покоя.

    Raises:
        ClosureFailureError: если решение недопустимо или не замыкается
    """
    pg = sol.params if p is None else p.with_gamma(sol.gamma)
    if not sol.admissible:
        raise ClosureFailureError(
            f"orbit at gamma={sol.gamma} is inadmissible",
            {"gamma": sol.gamma, "failed": sol.admissibility.failed()},
        )
    if in_resonance_band(pg):
        log.debug(f"gamma={pg.gamma} in resonance band, slip arcs are integrated numerically")
    traj = integrate_stiction(sol.z0, TWO_PI, BranchPolicy.STICK_FIRST, pg)
    assert isinstance(traj, Trajectory)
    err = traj.end_state.distance(sol.z0)
    if err > CLOSURE_TOL:
        raise ClosureFailureError(
            f"orbit does not close: |phi_2pi(z0) - z0| = {err:.3e}",
            {"gamma": sol.gamma, "closure_error": err, "events": [e.kind.value for e in traj.events]},
        )
    # срыв в z0 открывает период и совпадает с событием в конце периода
    onset = Event(0.0, sol.z0, EventKind.STICK_TO_SLIP_ONSET, boundary=RegionLabel.BOUNDARY_C_MINUS)
    traj.events = [onset] + [e for e in traj.events if e.time < TWO_PI - CLOSURE_TOL]
    n_on = sum(1 for e in traj.events if e.kind is EventKind.STICK_TO_SLIP_ONSET)
    n_land = sum(1 for e in traj.events if e.kind is EventKind.SLIP_TO_STICK_LANDING)
    log.debug(f"orbit gamma={sol.gamma:.6g}: {n_on} onsets, {n_land} landings, closure {err:.2e}")
    return traj


def half_period_symmetry_error(traj: Trajectory, n: int = 400) -> float:
    """max |z(t + π) − S(z(t))| по t ∈ [0, π]."""
    ts = np.linspace(0.0, math.pi, n)
    lower = traj.states_at(ts)
    upper = traj.states_at(ts + math.pi)
    err = 0.0
    for a, b in zip(lower, upper):
        err = max(err, State.from_array(b).distance(symmetry_map(State.from_array(a))))
    return float(err)


__all__ = [
    "SYMMETRY_JACOBIAN",
    "CLOSURE_TOL",
    "symmetry_map",
    "Admissibility",
    "SlipStickSolution",
    "onset_position",
    "slipstick_residual",
    "check_admissibility",
    "solve_slipstick",
    "seed_slipstick",
    "assemble_full_orbit",
    "half_period_symmetry_error",
]
