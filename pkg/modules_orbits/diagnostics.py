# modules_orbits/diagnostics.py
"""
Проверки семейств орбит: отсутствие взрыва уток по амплитуде, рост
мультипликатора уток как 1/ε, трансверсальность глобального возврата
и расстояние между регуляризованной и разрывной орбитами.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from config_package.constants import BranchLabel, EventKind
from modules_common.errors import NewtonDivergenceError, NoIntersectionError, NoStickError, StepFailureError
from modules_model.params import TWO_PI, Params, State
from modules_orbits.continuation import OrbitBranch
from modules_orbits.shooting import RegularizedOrbit, shoot_periodic_regularized
from modules_orbits.slipstick import SlipStickSolution, assemble_full_orbit
from modules_pws.events import classify_landing, first_landing
from modules_pws.slip_flow import make_slip_arc
from modules_regularization.phi import RegParams

log = logging.getLogger("stiction-lab.orbits.diagnostics")

AMPLITUDE_FACTOR = 2.0
MIN_R2 = 0.9
ANGLE_MIN = 1e-3


# ── Мультипликатор уток по ε ────────────────────────────────────────────────


@dataclass
class MultiplierScan:
    """log|μ₃| орбиты при фиксированном γ для ряда ε и линейная подгонка по 1/ε."""

    gamma: float
    eps: List[float]
    log_mu3: List[float]
    slope: float
    intercept: float
    r2: float
    warnings: List[str] = field(default_factory=list)

    @property
    def grows(self) -> bool:
        return self.slope > 0.0 and self.r2 > MIN_R2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "eps": self.eps,
            "log_mu3": self.log_mu3,
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "grows_like_inverse_eps": self.grows,
        }


def _linear_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    if x.size < 2:
        return math.nan, math.nan, math.nan
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return float(slope), float(intercept), r2


def canard_multiplier_scan(
    orbit: RegularizedOrbit, eps_list: Sequence[float], p: Params, rp: RegParams
) -> MultiplierScan:
    """
    Продолжение орбиты по ε при фиксированном γ с записью log|μ₃|.

    ε обходятся от ближайшего к ε орбиты; каждая сошедшаяся орбита служит
    затравкой следующей.

    Raises:
        NewtonDivergenceError: если стрельба не сошлась ни при одном ε
    """
    order = sorted(eps_list, key=lambda e: abs(math.log(e) - math.log(orbit.eps)))
    prev = orbit
    done: Dict[float, float] = {}
    warnings: List[str] = []
    for e in order:
        try:
            cur = shoot_periodic_regularized(prev, p, rp.with_eps(e))
        except (NewtonDivergenceError, StepFailureError) as exc:
            msg = f"multiplier scan: no orbit at eps={e:g} ({exc})"
            log.warning(msg)
            warnings.append(msg)
            continue
        done[e] = cur.log_abs_mu3
        warnings.extend(cur.warnings)
        prev = cur
    if not done:
        raise NewtonDivergenceError(
            f"multiplier scan failed for every eps at gamma={orbit.gamma}", {"eps": list(eps_list)}
        )
    eps_sorted = sorted(done)
    logs = [done[e] for e in eps_sorted]
    slope, intercept, r2 = _linear_fit(1.0 / np.array(eps_sorted), np.array(logs))
    log.info(f"log|mu3| vs 1/eps at gamma={orbit.gamma:.6g}: slope {slope:.4g}, R^2 {r2:.4f}")
    return MultiplierScan(orbit.gamma, eps_sorted, logs, slope, intercept, r2, warnings)


# ── Взрыв уток ──────────────────────────────────────────────────────────────


@dataclass
class ExplosionReport:
    """Итог проверки отсутствия взрыва уток по амплитуде."""

    center_points: int
    amplitude_ratio: float
    amplitude_bounded: bool
    center_slope: Optional[float]
    center_r2: Optional[float]
    regular_slope: Optional[float]
    warnings: List[str] = field(default_factory=list)

    @property
    def multiplier_explodes(self) -> Optional[bool]:
        if self.center_slope is None or self.center_r2 is None:
            return None
        return self.center_slope > 0.0 and self.center_r2 > MIN_R2

    @property
    def regular_flat(self) -> Optional[bool]:
        """Регулярная ветвь растёт заметно медленнее центральной."""
        if self.regular_slope is None or self.center_slope is None:
            return None
        return self.regular_slope < 0.5 * self.center_slope

    @property
    def no_explosion(self) -> bool:
        return self.amplitude_bounded and self.multiplier_explodes is not False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center_points": self.center_points,
            "amplitude_ratio": self.amplitude_ratio,
            "amplitude_bounded": self.amplitude_bounded,
            "center_slope": self.center_slope,
            "center_r2": self.center_r2,
            "regular_slope": self.regular_slope,
            "multiplier_explodes": self.multiplier_explodes,
            "regular_flat": self.regular_flat,
            "no_canard_explosion": self.no_explosion,
        }


def _neighbour_amplitudes(branch: OrbitBranch) -> List[float]:
    """max|y| регулярных орбит, соседних с каждой серией Π_ε^c."""
    pts = branch.points
    out: List[float] = []
    for i, pt in enumerate(pts):
        if pt.label is not BranchLabel.PIEPS_CENTER:
            continue
        for j in (i - 1, i + 1):
            if 0 <= j < len(pts) and pts[j].label is not BranchLabel.PIEPS_CENTER:
                out.append(pts[j].max_abs_y)
    return out


def no_canard_explosion_check(
    branch: OrbitBranch,
    scan: Optional[MultiplierScan] = None,
    regular_scan: Optional[MultiplierScan] = None,
) -> ExplosionReport:
    """
    Амплитуда на Π_ε^c ограничена, а взрывается только мультипликатор.

    Args:
        branch: Размеченное семейство Π_ε
        scan: log|μ₃|(1/ε) орбиты-утки (canard_multiplier_scan)
        regular_scan: То же для орбиты Π_ε^r (контроль)
    """
    warnings: List[str] = []
    center = branch.labelled(BranchLabel.PIEPS_CENTER)
    neighbours = _neighbour_amplitudes(branch)
    if center and neighbours:
        ratio = max(pt.max_abs_y for pt in center) / min(neighbours)
    else:
        ratio = math.nan
        msg = "no canard segment with regular neighbours on the branch"
        log.warning(msg)
        warnings.append(msg)
    bounded = bool(math.isnan(ratio) or ratio <= AMPLITUDE_FACTOR)
    report = ExplosionReport(
        center_points=len(center),
        amplitude_ratio=ratio,
        amplitude_bounded=bounded,
        center_slope=scan.slope if scan else None,
        center_r2=scan.r2 if scan else None,
        regular_slope=regular_scan.slope if regular_scan else None,
        warnings=warnings,
    )
    log.info(
        f"canard explosion check: {len(center)} canard orbits, amplitude ratio {ratio:.3g}, "
        f"multiplier growth {report.multiplier_explodes}"
    )
    return report


# ── Трансверсальность глобального возврата ─────────────────────────────────


@dataclass(frozen=True)
class TransversalityReport:
    """
    Пересечение образа множества выхода с лепестком Υ^v на C_a.

    Attributes:
        gamma: Параметр
        theta_out: Фаза схода с C_r⁻ (y = 0, γ²x = μ_s − 1)
        theta_in: Фаза возвращения на γ²x = 1 − μ_s после симметрии
        angle: Угол пересечения кривой возврата с лепестком (рад)
        transversal: |angle| больше порога
    """

    gamma: float
    theta_out: float
    theta_in: float
    angle: float
    transversal: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "theta_out": self.theta_out,
            "theta_in": self.theta_in,
            "angle": self.angle,
            "transversal": self.transversal,
        }


def _return_point(theta: float, p: Params) -> Optional[Tuple[float, float]]:
    """
    (θ, γ²x) после дуги скольжения вниз из (x_c, 0, θ) и симметрии, или None,
    если дуга не приземляется на Σ_s.
    """
    x_c = (p.mu_s - 1.0) / p.gamma2
    z = State(x_c, 0.0, theta)
    arc = make_slip_arc(z, -1, p, TWO_PI)
    hit = first_landing(arc, -1, p, TWO_PI)
    if hit is None or hit.graze:
        return None
    land = arc.state(hit.dt)
    if classify_landing(land, -1, p) is not EventKind.SLIP_TO_STICK_LANDING:
        return None
    return theta + hit.dt + math.pi, -p.gamma2 * land.x


def transversality_check(gamma: float, p: Params, n: int = 200) -> TransversalityReport:
    """
    Трансверсальность образа схода с C_r⁻ к лепестку вдоль γ²x = μ_s − 1.

    При ε = 0 быстрые слои с C_r⁻ у ложной утки уходят в скольжение вниз из
    y = 0, γ²x = μ_s − 1 при θ ∈ (π/2, π − asin(1 + μ_d − μ_s)); после приземления
    и симметрии кривая (θ, γ²x) сравнивается с уровнем μ_s − 1.

    Raises:
        NoStickError: при μ_s ≤ 1
        NoIntersectionError: если кривая не пересекает лепесток
    """
    if p.mu_s <= 1.0:
        raise NoStickError(f"no sticking leaf for mu_s={p.mu_s}", {"mu_s": p.mu_s})
    pg = p.with_gamma(gamma)
    level = p.mu_s - 1.0
    s = 1.0 + p.mu_d - p.mu_s
    theta_hi = math.pi - math.asin(s) if abs(s) < 1.0 else math.pi
    lo, hi = 0.5 * math.pi + 1e-6, theta_hi - 1e-6

    def g(theta: float) -> float:
        r = _return_point(theta, pg)
        if r is None:
            raise ValueError(f"no landing from theta={theta}")
        return r[1] - level

    grid = np.linspace(lo, hi, n)
    vals: List[Optional[float]] = []
    for th in grid:
        try:
            vals.append(g(float(th)))
        except ValueError:
            vals.append(None)

    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a is None or b is None or a * b > 0.0:
            continue
        try:
            th_out = float(brentq(g, float(grid[i]), float(grid[i + 1]), xtol=1e-13)) if a * b < 0.0 else float(grid[i])
        except ValueError:
            continue
        h = 1e-6
        rp_, rm_ = _return_point(th_out + h, pg), _return_point(th_out - h, pg)
        r0 = _return_point(th_out, pg)
        if rp_ is None or rm_ is None or r0 is None:
            continue
        angle = math.atan2(rp_[1] - rm_[1], rp_[0] - rm_[0])
        report = TransversalityReport(
            gamma=gamma,
            theta_out=th_out,
            theta_in=float(r0[0]),
            angle=angle,
            transversal=abs(angle) > ANGLE_MIN,
        )
        log.info(f"transversality at gamma={gamma:.6g}: theta_out={th_out:.6f}, angle={angle:.4g} rad")
        return report

    raise NoIntersectionError(
        f"return of the departure set misses the sticking leaf at gamma={gamma}",
        {"gamma": gamma, "theta_range": [lo, hi]},
    )


# ── Сравнение орбит ─────────────────────────────────────────────────────────


def orbit_distance(reg: RegularizedOrbit, sol: SlipStickSolution, p: Optional[Params] = None) -> float:
    """sup по периоду расстояния в (x, y) между орбитами при одинаковой фазе θ."""
    traj = assemble_full_orbit(sol, p)
    t = np.mod(reg.theta_phase + reg.offsets - sol.theta0, TWO_PI)
    pws = traj.states_at(t)
    return float(np.max(np.hypot(reg.xy[:, 0] - pws[:, 0], reg.xy[:, 1] - pws[:, 1])))


__all__ = [
    "MultiplierScan",
    "canard_multiplier_scan",
    "ExplosionReport",
    "no_canard_explosion_check",
    "TransversalityReport",
    "transversality_check",
    "orbit_distance",
]
