# modules_pws/events.py
"""
Поиск событий на дугах залипания и скольжения.

Дуги залипания: корни sin θ = ±μ_s − γ²x0 в замкнутой форме.
Дуги скольжения: сканирование y(t) на сетке, скобка + brentq + шаг Ньютона,
касания y = 0 ищутся как внутренние минимумы σ·y(t).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from config_package.constants import (
    EventKind,
    FieldBranch,
    RegionLabel,
    SingularSet,
    TangencyKind,
    TangencyLabel,
)
from config_package.settings import settings
from modules_common.errors import (
    BranchNotApplicableError,
    NoEventWithinHorizonError,
    RootPolishError,
)
from modules_model.params import TWO_PI, Params, State, wrap_angle
from modules_model.services import (
    HALF_PI,
    LIE_TOL,
    THREE_HALF_PI,
    forward_singular_set,
    lie_derivatives,
    xi,
)
from modules_pws.slip_flow import make_slip_arc

log = logging.getLogger("stiction-lab.pws.events")

# ширина окна, в котором |sin θ| считается равным 1 (касание листа с ∂Σ_c±)
STICK_TANGENT_TOL = 1e-12
# корни ближе этого к началу дуги принадлежат самой начальной точке
MIN_EVENT_TIME = 1e-12
# начальные смещения для запуска дуги с y0 = 0
_LAUNCH_OFFSETS = (1e-9, 1e-7, 1e-5, 1e-3)
_CHUNK = 1024


@dataclass(frozen=True)
class Event:
    """
    Событие интегратора.

    Attributes:
        time: Момент события (абсолютный в траектории, от начала дуги в next_event)
        state: Точка события
        kind: Тип события
        i_set: I⁺/I⁻ для SINGULAR_HIT
        tangency: Тип касания для TANGENCY_GRAZE
        boundary: ∂Σ_c⁺/∂Σ_c⁻ для событий на границе залипания
    """

    time: float
    state: State
    kind: EventKind
    i_set: Optional[SingularSet] = None
    tangency: Optional[TangencyLabel] = None
    boundary: Optional[RegionLabel] = None

    def shifted(self, dt: float) -> "Event":
        return replace(self, time=self.time + dt)

    def mapped(self, transform: Callable[[State], State]) -> "Event":
        """Образ события под отображением фазового пространства (симметрия S)."""
        swap_set = {SingularSet.I_MINUS: SingularSet.I_PLUS, SingularSet.I_PLUS: SingularSet.I_MINUS}
        swap_boundary = {
            RegionLabel.BOUNDARY_C_MINUS: RegionLabel.BOUNDARY_C_PLUS,
            RegionLabel.BOUNDARY_C_PLUS: RegionLabel.BOUNDARY_C_MINUS,
        }
        swap_kind = {
            EventKind.CROSSING_UP: EventKind.CROSSING_DOWN,
            EventKind.CROSSING_DOWN: EventKind.CROSSING_UP,
        }
        return Event(
            time=self.time,
            state=transform(self.state),
            kind=swap_kind.get(self.kind, self.kind),
            i_set=swap_set.get(self.i_set) if self.i_set else None,
            tangency=self.tangency,
            boundary=swap_boundary.get(self.boundary) if self.boundary else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "t": self.time,
            "kind": self.kind.value,
            "state": [self.state.x, self.state.y, self.state.theta],
        }
        if self.i_set is not None:
            d["i_set"] = self.i_set.value
        if self.tangency is not None:
            d["tangency"] = self.tangency.value
        return d


class StickExit(NamedTuple):
    """Первый выход дуги залипания на ∂Σ_c±."""

    dt: float
    boundary: RegionLabel
    tangent: bool


class SlipHit(NamedTuple):
    """Первое возвращение дуги скольжения на y = 0."""

    dt: float
    graze: bool


# ── Дуги залипания ──────────────────────────────────────────────────────────


def _root_phases(s: float):
    """Фазы θ ∈ [0, 2π) с sin θ = s и признак касания |s| = 1."""
    if abs(s) > 1.0 + STICK_TANGENT_TOL:
        return [], False
    if abs(s) >= 1.0 - STICK_TANGENT_TOL:
        return [HALF_PI if s > 0 else THREE_HALF_PI], True
    a = math.asin(s)
    return [wrap_angle(a), wrap_angle(math.pi - a)], False


def stick_exit(z0: State, p: Params, horizon: Optional[float] = None) -> Optional[StickExit]:
    """
    Время выхода дуги залипания из Σ_s.

    На листе x = x0 функция ξ(θ) = γ²x0 + sin θ достигает ±μ_s при
    sin θ = ±μ_s − γ²x0. Берётся наименьшее Δ > 0.

    Returns:
        StickExit или None, если выхода нет до горизонта
    """
    g2x = p.gamma2 * z0.x
    best: Optional[StickExit] = None
    for boundary, s in (
        (RegionLabel.BOUNDARY_C_MINUS, p.mu_s - g2x),
        (RegionLabel.BOUNDARY_C_PLUS, -p.mu_s - g2x),
    ):
        phases, tangent = _root_phases(s)
        for ph in phases:
            dt = (ph - z0.theta) % TWO_PI
            # корень в самой начальной точке не считается
            if dt <= MIN_EVENT_TIME or TWO_PI - dt <= MIN_EVENT_TIME:
                dt = TWO_PI
            if best is None or dt < best.dt:
                best = StickExit(dt, boundary, tangent)
    if best is None:
        return None
    if horizon is not None and best.dt > horizon:
        return None
    return best


def stick_exit_event(z0: State, p: Params, hit: StickExit) -> Event:
    """Событие на ∂Σ_c± по найденному выходу дуги залипания."""
    if hit.tangent:
        theta = HALF_PI if hit.boundary is RegionLabel.BOUNDARY_C_MINUS else THREE_HALF_PI
    else:
        theta = z0.theta + hit.dt
    ze = State(z0.x, 0.0, theta)
    i_set = forward_singular_set(ze, p)
    if i_set is not None:
        return Event(hit.dt, ze, EventKind.SINGULAR_HIT, i_set=i_set, boundary=hit.boundary)
    return Event(hit.dt, ze, EventKind.STICK_TO_SLIP_ONSET, boundary=hit.boundary)


# ── Дуги скольжения ─────────────────────────────────────────────────────────


def slip_scan_step(p: Params) -> float:
    """Шаг сетки сканирования: разрешает обе частоты 1 и γ."""
    return min(0.02, 0.05 / p.gamma)


def _launch_time(g: Callable[[float], float], y0_signed: float) -> float:
    """Левая граница сканирования, где σ·y > 0."""
    if y0_signed > 0.0:
        return 0.0
    for tl in _LAUNCH_OFFSETS:
        v = g(tl)
        if v > 1e-15:
            return tl
        if v < -1e-15:
            raise BranchNotApplicableError(
                "slip field points back into y=0 at launch", {"g": v, "t": tl}
            )
    raise BranchNotApplicableError("slip arc does not leave y=0", {})


def _polish(arc, sigma: int, a: float, b: float) -> float:
    """Корень y(t) = 0 в скобке [a, b] с полировкой шагом Ньютона."""

    def g(t: float) -> float:
        return sigma * float(arc.xy(np.array(t))[1])

    ga, gb = g(a), g(b)
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    t = brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    r = abs(g(t))
    yd = float(arc.ydot(np.array(t)))
    if yd != 0.0:
        t2 = t - sigma * g(t) / yd
        if a <= t2 <= b and abs(g(t2)) < r:
            t, r = t2, abs(g(t2))
    if r > settings.classify_tol:
        raise RootPolishError(f"slip landing residual {r:.3e} too large", {"t": t, "residual": r})
    return t


def first_landing(
    arc, sigma: int, p: Params, horizon: float, t_from: float = 0.0
) -> Optional[SlipHit]:
    """
    Первое t > t_from, где дуга скольжения возвращается на y = 0.

    Args:
        arc: SlipArc или NumericSlipArc
        sigma: Знак скорости на дуге
        p: Параметры
        horizon: Максимальное время
        t_from: Начало сканирования (после видимого касания дуга продолжается)

    Returns:
        SlipHit (время и признак касания) или None
    """

    def g(t: float) -> float:
        return sigma * float(arc.xy(np.array(t))[1])

    graze_tol = settings.classify_tol
    if t_from > 0.0:
        t_left = t_from
    else:
        t_left = _launch_time(g, sigma * arc.z0.y if abs(arc.z0.y) > 1e-15 else 0.0)
    if t_left >= horizon:
        return None
    h = slip_scan_step(p)
    n_total = max(2, int(math.ceil((horizon - t_left) / h)) + 1)
    start = 0
    while start < n_total - 1:
        stop = min(start + _CHUNK, n_total - 1)
        idx = np.arange(start, stop + 1)
        ts = np.minimum(t_left + idx * h, horizon)
        gv = sigma * arc.xy(ts)[1]

        neg = np.nonzero(gv[1:] <= 0.0)[0]
        i_cross = int(neg[0]) + 1 if neg.size else None
        last = (i_cross if i_cross is not None else len(ts) - 1)

        # внутренние минимумы до первой смены знака
        for j in range(1, last):
            if not (gv[j] < gv[j - 1] and gv[j] <= gv[j + 1]):
                continue
            res = minimize_scalar(g, bounds=(ts[j - 1], ts[j + 1]), method="bounded", options={"xatol": 1e-14})
            t_min, g_min = float(res.x), float(res.fun)
            if t_min <= t_left + 1e-9:
                continue
            if g_min < -graze_tol:
                return SlipHit(_polish(arc, sigma, float(ts[j - 1]), t_min), False)
            if g_min <= graze_tol:
                return SlipHit(t_min, True)

        if i_cross is not None:
            return SlipHit(_polish(arc, sigma, float(ts[i_cross - 1]), float(ts[i_cross])), False)
        start = stop - 1 if stop < n_total - 1 else stop
    return None


def classify_landing(z: State, sigma: int, p: Params, tol: Optional[float] = None) -> EventKind:
    """Тип приземления дуги скольжения на y = 0 по значению ξ."""
    tol = settings.classify_tol if tol is None else tol
    v = xi(z.x, z.theta, p)
    if abs(abs(v) - p.mu_s) <= tol:
        return EventKind.UNDEFINED_FRICTION_HIT
    if abs(v) < p.mu_s:
        return EventKind.SLIP_TO_STICK_LANDING
    if sigma > 0 and v > p.mu_s:
        return EventKind.CROSSING_DOWN
    if sigma < 0 and v < -p.mu_s:
        return EventKind.CROSSING_UP
    raise RootPolishError(
        f"inconsistent landing: sigma={sigma}, xi={v}", {"state": z.as_tuple(), "xi": v}
    )


def graze_label(z: State, sigma: int, p: Params) -> TangencyLabel:
    """Тип касания дуги скольжения с y = 0 (по второй производной Ли)."""
    which = TangencyKind.Z_PLUS_ON_SIGMA if sigma > 0 else TangencyKind.Z_MINUS_ON_SIGMA
    _, l2, l3 = lie_derivatives(z.with_y(0.0), p, which)
    if l2 > 1e-8:
        return TangencyLabel.VISIBLE
    if l2 < -1e-8:
        return TangencyLabel.INVISIBLE
    return TangencyLabel.CUSP if abs(l3) > LIE_TOL else TangencyLabel.NONE


def slip_hit_event(arc, sigma: int, p: Params, hit: SlipHit) -> Event:
    z = arc.state(hit.dt)
    if hit.graze:
        return Event(hit.dt, z, EventKind.TANGENCY_GRAZE, tangency=graze_label(z, sigma, p))
    zl = z.with_y(0.0)
    return Event(hit.dt, zl, classify_landing(zl, sigma, p))


# ── Общий вход ──────────────────────────────────────────────────────────────


def next_event(
    z0: State, branch: FieldBranch, p: Params, horizon: Optional[float] = None
) -> Event:
    """
    Первое событие на дуге поля branch, начинающейся в z0.

    Args:
        z0: Начальная точка
        branch: STICK или поле скольжения PLUS/MINUS
        p: Параметры
        horizon: Горизонт поиска (по умолчанию t_max из настроек)

    Returns:
        Event со временем от начала дуги

    Raises:
        NoEventWithinHorizonError: если события нет до горизонта
        BranchNotApplicableError: если z0 не в области поля
    """
    horizon = settings.t_max if horizon is None else horizon
    if branch is FieldBranch.STICK:
        if abs(z0.y) > settings.classify_tol:
            raise BranchNotApplicableError(f"stick arc requires y=0, got y={z0.y}", {"y": z0.y})
        hit = stick_exit(z0.with_y(0.0), p, horizon)
        if hit is None:
            raise NoEventWithinHorizonError(
                f"stick arc at x={z0.x} does not escape within {horizon}", {"x": z0.x, "horizon": horizon}
            )
        return stick_exit_event(z0.with_y(0.0), p, hit)

    sigma = branch.sigma
    if z0.y * sigma < -settings.classify_tol:
        raise BranchNotApplicableError(
            f"slip arc with sigma={sigma} cannot start at y={z0.y}", {"y": z0.y, "sigma": sigma}
        )
    arc = make_slip_arc(z0, sigma, p, horizon)
    hit = first_landing(arc, sigma, p, horizon)
    if hit is None:
        raise NoEventWithinHorizonError(f"slip arc does not return to y=0 within {horizon}", {"horizon": horizon})
    return slip_hit_event(arc, sigma, p, hit)


__all__ = [
    "Event",
    "StickExit",
    "SlipHit",
    "stick_exit",
    "stick_exit_event",
    "slip_scan_step",
    "first_landing",
    "classify_landing",
    "graze_label",
    "slip_hit_event",
    "next_event",
]
