# modules_orbits/regularized_branch.py
"""
Семейство Π_ε периодических орбит регуляризованной системы.

Продолжение по псевдодлине дуги в (U, γ), где U — узлы стрельбы. Складки по γ
отмечаются сменой знака γ-компоненты касательной. Сегменты семейства:
Π_ε^l и Π_ε^r — регулярные орбиты по разные стороны от γ = 1, Π_ε^c — орбиты-утки
седлового типа между ними.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid

from config_package.constants import BranchLabel, FloquetClass, TerminationReason
from modules_common.errors import NewtonDivergenceError, StepFailureError
from modules_common.newton import newton_solve
from modules_model.params import Params
from modules_orbits.continuation import OrbitBranch, OrbitPoint
from modules_orbits.shooting import (
    CONDITIONING_LIMIT,
    LOG_GROWTH_PER_SEGMENT,
    SHOOT_TOL,
    RegularizedOrbit,
    SeedLike,
    ShootingSeed,
    build_orbit,
    growth_density,
    segment_phases,
    shoot_periodic_regularized,
    shooting_system,
)
from modules_orbits.slipstick import seed_slipstick
from modules_regularization.phi import RegParams

log = logging.getLogger("stiction-lab.orbits.reg_branch")

# относительный допуск совпадения орбит при разных фазах начала
DEDUP_RTOL = 1e-4


class ArclengthPolicy(BaseModel):
    """Управление шагом по псевдодлине дуги (в масштабированных переменных)."""

    model_config = ConfigDict(frozen=True)

    ds0: float = Field(default=0.02, gt=0)
    ds_min: float = Field(default=1e-6, gt=0)
    ds_max: float = Field(default=0.2, gt=0)
    grow: float = Field(default=1.3, gt=1)
    shrink: float = Field(default=0.5, gt=0, lt=1)
    target_iterations: int = Field(default=4, ge=1)
    max_steps: int = Field(default=400, gt=0)
    tol: float = Field(default=SHOOT_TOL, gt=0)


@dataclass
class _Current:
    orbit: RegularizedOrbit
    U: np.ndarray
    phases: np.ndarray
    tau: np.ndarray


def _tangent(J: np.ndarray, Fg: np.ndarray, scale: np.ndarray, ref: Optional[Tuple[np.ndarray, float]]) -> np.ndarray:
    """
    Единичная касательная к {F(U, γ) = 0} в масштабированных переменных.

    ref — (касательная в первом узле, γ-компонента) предыдущей точки для ориентации.
    """
    A = np.hstack([J, Fg[:, None]]) * scale[None, :]
    _, _, vt = np.linalg.svd(A)
    tau = vt[-1]
    tau = tau / np.linalg.norm(tau)
    if ref is None:
        if tau[-1] < 0.0:
            tau = -tau
    else:
        key = np.concatenate([tau[:2], [tau[-1]]])
        ref_key = np.concatenate([ref[0], [ref[1]]])
        if float(key @ ref_key) < 0.0:
            tau = -tau
    return tau


def _needs_repartition(orbit: RegularizedOrbit, p: Params, rp: RegParams) -> bool:
    """Рост на каком-либо сегменте вдвое больше расчётного."""
    dens = growth_density(orbit.xy, p, rp)
    offs = orbit.phases - orbit.phases[0]
    if orbit.segments == 1:
        return float(trapezoid(dens, orbit.offsets)) > math.log(CONDITIONING_LIMIT)
    for a, b in zip(offs[:-1], offs[1:]):
        m = (orbit.offsets >= a) & (orbit.offsets <= b)
        if np.count_nonzero(m) > 1 and float(trapezoid(dens[m], orbit.offsets[m])) > 2.0 * LOG_GROWTH_PER_SEGMENT:
            return True
    return False


def _reshoot(orbit: RegularizedOrbit, p: Params, rp: RegParams, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Та же орбита с новыми узлами (после перераспределения)."""
    seed = orbit.to_seed()
    phases = segment_phases(seed, p, rp)
    U0 = seed.at(phases[:-1] - phases[0]).ravel()

    def func(U: np.ndarray):
        F, J, _, _ = shooting_system(U, phases, p, rp)
        return F, J

    res = newton_solve(func, U0, tol=tol, label=f"reshoot(gamma={p.gamma:.6g})")
    return res.x, phases


def _point(orbit: RegularizedOrbit) -> OrbitPoint:
    return OrbitPoint(gamma=orbit.gamma, orbit=orbit, floquet=orbit.floquet, max_abs_y=orbit.max_abs_y)


def label_segments(branch: OrbitBranch) -> None:
    """
    Метки Π_ε^l / Π_ε^c / Π_ε^r по точкам семейства.

    Утки седлового типа — Π_ε^c; каждая непрерывная серия регулярных орбит
    получает метку по медиане γ относительно резонанса.
    """
    flags = [
        bool(pt.orbit.is_canard and pt.floquet is not None and pt.floquet.klass is FloquetClass.SADDLE)
        for pt in branch.points
    ]
    i = 0
    n = len(branch.points)
    while i < n:
        j = i
        while j < n and flags[j] == flags[i]:
            j += 1
        run = branch.points[i:j]
        if flags[i]:
            lab = BranchLabel.PIEPS_CENTER
        else:
            lab = BranchLabel.PIEPS_LEFT if float(np.median([pt.gamma for pt in run])) < 1.0 else BranchLabel.PIEPS_RIGHT
        for pt in run:
            pt.label = lab
        i = j


def _fold_gamma(s: List[float], g: List[float]) -> float:
    """Экстремум γ(s) по параболе через три последние точки."""
    if len(s) < 3:
        return float(max(g[-2:], key=abs))
    c = np.polyfit(np.array(s[-3:]), np.array(g[-3:]), 2)
    if abs(c[0]) < 1e-300:
        return float(g[-1])
    s_star = -c[1] / (2.0 * c[0])
    if not min(s[-3:]) <= s_star <= max(s[-3:]):
        return float(g[-2])
    return float(np.polyval(c, s_star))


def continue_branch_regularized(
    p: Params,
    rp: RegParams,
    gamma_range: Tuple[float, float],
    seed: Optional[SeedLike] = None,
    seed_gamma: Optional[float] = None,
    policy: Optional[ArclengthPolicy] = None,
    direction: int = 1,
) -> OrbitBranch:
    """
    Продолжение Π_ε по псевдодлине дуги через складки.

    Args:
        p: Параметры модели
        rp: Параметры регуляризации
        gamma_range: Границы по γ; выход за них останавливает продолжение
        seed: Затравка (орбита или разрывное решение); по умолчанию — Π₀ при seed_gamma
        seed_gamma: γ затравки (по умолчанию нижняя граница диапазона)
        policy: Управление шагом
        direction: Начальное направление по γ (+1 или −1)

    Returns:
        OrbitBranch с метками сегментов и складками

    Raises:
        NewtonDivergenceError: если затравка не сходится
    """
    policy = policy or ArclengthPolicy()
    lo, hi = sorted(gamma_range)
    if seed is None:
        g0 = lo if seed_gamma is None else seed_gamma
        found = seed_slipstick(g0, p)
        if not found:
            raise NewtonDivergenceError(f"no slip-stick orbit to seed from at gamma={g0}", {"gamma": g0})
        seed = found[0]
    first = shoot_periodic_regularized(seed, p, rp, tol=policy.tol)
    pg = p.with_gamma(first.gamma)

    U = first.nodes.ravel()
    _, J, Fg, _ = shooting_system(U, first.phases, pg, rp)
    scale = np.concatenate([np.full(U.size, max(float(np.max(np.abs(U))), 1e-8)), [max(first.gamma, 1.0)]])
    tau = _tangent(J, Fg, scale, None)
    if direction < 0:
        tau = -tau
    cur = _Current(first, U, first.phases, tau)

    branch = OrbitBranch(points=[_point(first)])
    s_hist: List[float] = [0.0]
    g_hist: List[float] = [first.gamma]
    s_total = 0.0
    ds = policy.ds0
    reason = TerminationReason.MAX_STEPS

    for step in range(policy.max_steps):
        pc = p.with_gamma(cur.orbit.gamma)
        if _needs_repartition(cur.orbit, pc, rp):
            try:
                U_new, phases_new = _reshoot(cur.orbit, pc, rp, policy.tol)
            except (NewtonDivergenceError, StepFailureError) as e:
                log.warning(f"repartition failed at gamma={pc.gamma:.6g}: {e}")
            else:
                _, J, Fg, _ = shooting_system(U_new, phases_new, pc, rp)
                scale = np.concatenate([np.full(U_new.size, scale[0]), [scale[-1]]])
                ref = (cur.tau[:2], float(cur.tau[-1]))
                cur = _Current(cur.orbit, U_new, phases_new, _tangent(J, Fg, scale, ref))
                log.debug(f"repartitioned to {len(phases_new) - 1} segments at gamma={pc.gamma:.6g}")

        z_prev = np.concatenate([cur.U, [cur.orbit.gamma]]) / scale
        accepted = None
        while ds >= policy.ds_min:
            z_pred = z_prev + ds * cur.tau
            phases = cur.phases
            tau_c = cur.tau

            def func(z: np.ndarray):
                w = z * scale
                pz = p.with_gamma(float(w[-1]))
                F_, J_, Fg_, _ = shooting_system(w[:-1], phases, pz, rp)
                A = np.hstack([J_, Fg_[:, None]]) * scale[None, :]
                G = np.concatenate([F_, [float(tau_c @ (z - z_pred))]])
                return G, np.vstack([A, tau_c[None, :]])

            try:
                res = newton_solve(func, z_pred, tol=policy.tol, max_iter=12, label=f"arclength step {step}")
            except (NewtonDivergenceError, StepFailureError, ValueError) as e:
                log.debug(f"arclength step {step} with ds={ds:.3g} rejected: {e}")
                ds *= policy.shrink
                continue
            accepted = res
            break

        if accepted is None:
            reason = TerminationReason.STEP_UNDERFLOW
            break

        w = accepted.x * scale
        g_new = float(w[-1])
        pn = p.with_gamma(g_new)
        F_, J_, Fg_, segs = shooting_system(w[:-1], cur.phases, pn, rp)
        orbit = build_orbit(w[:-1], float(np.max(np.abs(F_))), segs, cur.phases, pn, rp)
        tau_new = _tangent(J_, Fg_, scale, (cur.tau[:2], float(cur.tau[-1])))

        s_total += float(np.linalg.norm(accepted.x - z_prev))
        s_hist.append(s_total)
        g_hist.append(g_new)
        if tau_new[-1] * cur.tau[-1] < 0.0:
            branch.folds.append(len(branch.points) - 1)
            g_fold = _fold_gamma(s_hist, g_hist)
            branch.fold_gammas.append(g_fold)
            log.info(f"fold in gamma near {g_fold:.6g}")

        branch.points.append(_point(orbit))
        cur = _Current(orbit, w[:-1], cur.phases, tau_new)
        if accepted.iterations <= policy.target_iterations:
            ds = min(ds * policy.grow, policy.ds_max)
        else:
            ds = max(ds * policy.shrink, policy.ds_min)

        if not lo <= g_new <= hi:
            reason = TerminationReason.REACHED_END
            break

    branch.terminations = {"start": TerminationReason.REACHED_END, "end": reason}
    label_segments(branch)
    log.info(f"pi_eps: {len(branch)} orbits, folds at {branch.fold_gammas}, stopped by {reason.value}")
    return branch


def _orbit_signature(o: RegularizedOrbit) -> Tuple[float, float, float]:
    """Признаки орбиты, не зависящие от фазы начала: max|x|, max|y|, log|μ₃|."""
    return (float(np.max(np.abs(o.xy[:, 0]))), o.max_abs_y, o.log_abs_mu3)


def _same_orbit(a: RegularizedOrbit, b: RegularizedOrbit, rtol: float = DEDUP_RTOL) -> bool:
    """Одна и та же орбита, уточнённая с разных фаз или из разных интервалов."""
    return all(abs(u - v) <= rtol * (1.0 + abs(v)) for u, v in zip(_orbit_signature(a), _orbit_signature(b)))


def orbits_at_gamma(branch: OrbitBranch, gamma: float, p: Params, rp: RegParams) -> List[RegularizedOrbit]:
    """
    Все орбиты семейства при данном γ: пересечения ломаной γ(s) с уровнем γ,
    уточнённые стрельбой при фиксированном γ.
    """
    out: List[RegularizedOrbit] = []
    pts = branch.points
    for a, b in zip(pts[:-1], pts[1:]):
        if (a.gamma - gamma) * (b.gamma - gamma) > 0.0 or a.gamma == b.gamma:
            continue
        base = a if abs(a.gamma - gamma) <= abs(b.gamma - gamma) else b
        seed = base.orbit.to_seed()
        seed = ShootingSeed(gamma=gamma, theta_phase=seed.theta_phase, offsets=seed.offsets, xy=seed.xy)
        try:
            out.append(shoot_periodic_regularized(seed, p, rp))
        except (NewtonDivergenceError, StepFailureError) as e:
            log.warning(f"refinement at gamma={gamma} near branch point {base.gamma:.6g} failed: {e}")
    uniq: List[RegularizedOrbit] = []
    for o in out:
        if not any(_same_orbit(o, u) for u in uniq):
            uniq.append(o)
    if len(uniq) < len(out):
        log.debug(f"gamma={gamma}: {len(out) - len(uniq)} duplicate refinements dropped")
    return uniq


__all__ = [
    "ArclengthPolicy",
    "label_segments",
    "continue_branch_regularized",
    "orbits_at_gamma",
]
