# modules_orbits/shooting.py
"""
Периодические орбиты регуляризованной системы методом стрельбы.

Так как θ' = 1, θ служит временем, период равен 2π, а фазовое условие —
фиксированная фаза θ_p начала орбиты. Неизвестные — (x, y) в узлах
θ_p = θ_0 < θ_1 < … < θ_K = θ_p + 2π; невязки — разрывы решения в узлах.

Вариационные уравнения интегрируются вместе с решением (Radau, аналитический
якобиан): матрица перехода сегмента G_k, чувствительность к γ и
log det G_k = ∫ −μ_d φ′(y/ε)/ε dθ. Вдоль отталкивающей ветви C_r рост G_k
порядка e^{c/ε}, поэтому узлы расставляются так, чтобы рост на сегменте
оставался умеренным.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp, trapezoid

from modules_common.errors import StepFailureError
from modules_common.newton import newton_solve
from modules_model.params import TWO_PI, Params, State
from modules_orbits.floquet import LOG_FLOAT_MAX, FloquetData, classify_multipliers
from modules_orbits.slipstick import SlipStickSolution
from modules_regularization.phi import RegParams
from modules_regularization.stiff import on_attracting_manifold, stiff_integrate

log = logging.getLogger("stiction-lab.orbits.shooting")

SHOOT_RTOL = 1e-11
SHOOT_ATOL = 1e-13
SHOOT_TOL = 1e-9

# рост на сегменте, log‖G_k‖
LOG_GROWTH_PER_SEGMENT = 12.0
CONDITIONING_LIMIT = 1e8
OVERFLOW_LIMIT = 1e12
MIN_MULTI_SEGMENTS = 8
MAX_SEGMENTS = 2048
N_SAMPLES = 2048
# время на C_r, начиная с которого орбита считается уткой
CANARD_TIME_MIN = 0.05


# ── Вариационная система ────────────────────────────────────────────────────
# u = (x, y, a, b, c, d, s_x, s_y, ℓ): G = [[a, b], [c, d]], s = ∂(x, y)/∂γ, ℓ = log det G


def variational_rhs(t: float, u: np.ndarray, p: Params, rp: RegParams) -> np.ndarray:
    x, y = u[0], u[1]
    g2 = p.gamma2
    yh = y / rp.eps
    damp = p.mu_d * float(rp.phi.d1(yh)) / rp.eps
    return np.array(
        [
            y,
            -g2 * x - math.sin(t) - p.mu_d * float(rp.phi.value(yh)),
            u[4],
            u[5],
            -g2 * u[2] - damp * u[4],
            -g2 * u[3] - damp * u[5],
            u[7],
            -g2 * u[6] - damp * u[7] - 2.0 * p.gamma * x,
            -damp,
        ]
    )


def variational_jacobian(t: float, u: np.ndarray, p: Params, rp: RegParams) -> np.ndarray:
    g2 = p.gamma2
    yh = u[1] / rp.eps
    damp = p.mu_d * float(rp.phi.d1(yh)) / rp.eps
    ddamp = p.mu_d * float(rp.phi.d2(yh)) / (rp.eps * rp.eps)
    J = np.zeros((9, 9))
    J[0, 1] = 1.0
    J[1, 0] = -g2
    J[1, 1] = -damp
    J[2, 4] = 1.0
    J[3, 5] = 1.0
    J[4, 1] = -ddamp * u[4]
    J[4, 2] = -g2
    J[4, 4] = -damp
    J[5, 1] = -ddamp * u[5]
    J[5, 3] = -g2
    J[5, 5] = -damp
    J[6, 7] = 1.0
    J[7, 0] = -2.0 * p.gamma
    J[7, 1] = -ddamp * u[7]
    J[7, 6] = -g2
    J[7, 7] = -damp
    J[8, 1] = -ddamp
    return J


@dataclass(frozen=True)
class SegmentFlow:
    """Решение и вариации на сегменте [θ_a, θ_b]."""

    end: np.ndarray
    G: np.ndarray
    dgamma: np.ndarray
    log_det: float


def flow_segment(
    u0: np.ndarray,
    th_a: float,
    th_b: float,
    p: Params,
    rp: RegParams,
    rtol: float = SHOOT_RTOL,
    atol: float = SHOOT_ATOL,
) -> SegmentFlow:
    """
    Raises:
        StepFailureError: если Radau не дошёл до конца сегмента
    """
    w0 = np.array([u0[0], u0[1], 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    res = solve_ivp(
        variational_rhs,
        (th_a, th_b),
        w0,
        method="Radau",
        jac=variational_jacobian,
        rtol=rtol,
        atol=atol,
        args=(p, rp),
    )
    if res.status == -1:
        raise StepFailureError(
            f"variational integration failed on [{th_a:.6g}, {th_b:.6g}]: {res.message}",
            {"theta_a": th_a, "theta_b": th_b, "gamma": p.gamma, "eps": rp.eps},
        )
    w = res.y[:, -1]
    return SegmentFlow(
        end=w[:2].copy(),
        G=np.array([[w[2], w[3]], [w[4], w[5]]]),
        dgamma=w[6:8].copy(),
        log_det=float(w[8]),
    )


def shooting_system(
    U: np.ndarray,
    phases: np.ndarray,
    p: Params,
    rp: RegParams,
    rtol: float = SHOOT_RTOL,
    atol: float = SHOOT_ATOL,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[SegmentFlow]]:
    """
    Невязки многократной стрельбы r_k = φ_k(u_k) − u_{k+1} (циклически).

    Returns:
        (F, ∂F/∂U, ∂F/∂γ, сегменты)
    """
    K = len(phases) - 1
    nodes = U.reshape(K, 2)
    segs = [flow_segment(nodes[k], phases[k], phases[k + 1], p, rp, rtol, atol) for k in range(K)]
    F = np.empty(2 * K)
    J = np.zeros((2 * K, 2 * K))
    Fg = np.empty(2 * K)
    for k, s in enumerate(segs):
        nxt = (k + 1) % K
        F[2 * k : 2 * k + 2] = s.end - nodes[nxt]
        J[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] += s.G
        J[2 * k : 2 * k + 2, 2 * nxt : 2 * nxt + 2] -= np.eye(2)
        Fg[2 * k : 2 * k + 2] = s.dgamma
    return F, J, Fg, segs


# ── Мультипликаторы ─────────────────────────────────────────────────────────


def _power_log(blocks: List[np.ndarray], cycles: int = 12) -> Tuple[float, float]:
    """log|μ₃| и его знак перенормированной степенной итерацией по блокам."""
    v = np.array([1.0, 1.0]) / math.sqrt(2.0)
    last = math.nan
    sign = 1.0
    for _ in range(cycles):
        start = v.copy()
        acc = 0.0
        for G in blocks:
            w = G @ v
            n = float(np.linalg.norm(w))
            acc += math.log(n)
            v = w / n
        sign = 1.0 if float(v @ start) >= 0.0 else -1.0
        if abs(acc - last) <= 1e-12 * max(1.0, abs(acc)):
            return acc, sign
        last = acc
    return last, sign


def _from_log(logv: float, sign: float) -> complex:
    if logv >= LOG_FLOAT_MAX:
        return complex(sign * math.inf)
    return complex(sign * math.exp(logv))


def regularized_multipliers(segs: List[SegmentFlow]) -> FloquetData:
    """
    {1, μ₂, μ₃} по матрицам сегментов.

    При умеренном росте — собственные числа произведения. Иначе log|μ₃| берётся
    из степенной итерации, а log|μ₂| = Σ log det G_k − log|μ₃|.
    """
    blocks = [s.G for s in segs]
    bound = sum(math.log(max(float(np.linalg.norm(G, 2)), 1e-300)) for G in blocks)
    log_det = sum(s.log_det for s in segs)
    if bound < math.log(OVERFLOW_LIMIT):
        M = np.eye(2)
        for G in blocks:
            M = G @ M
        eig = sorted((complex(m) for m in np.linalg.eigvals(M)), key=abs)
        logs = [math.log(abs(m)) if m != 0 else -math.inf for m in eig]
        mults = (1.0 + 0.0j, eig[0], eig[1])
    else:
        l3, sign = _power_log(blocks)
        l2 = log_det - l3
        mults = (1.0 + 0.0j, _from_log(l2, sign), _from_log(l3, sign))
        logs = [l2, l3]
    return FloquetData(
        multipliers=mults,
        klass=classify_multipliers(logs),
        log_abs=(0.0, float(logs[0]), float(logs[1])),
    )


# ── Затравки и орбиты ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class ShootingSeed:
    """
    Приближение орбиты на периоде: выборка (x, y) по смещению фазы от θ_p.
    """

    gamma: float
    theta_phase: float
    offsets: np.ndarray
    xy: np.ndarray

    def at(self, offsets: np.ndarray) -> np.ndarray:
        o = np.asarray(offsets, dtype=float)
        return np.column_stack(
            [np.interp(o, self.offsets, self.xy[:, 0]), np.interp(o, self.offsets, self.xy[:, 1])]
        )


@dataclass
class RegularizedOrbit:
    """
    Периодическая орбита регуляризованной системы.

    Attributes:
        gamma, eps: Параметры
        theta_phase: Фаза начала орбиты
        phases: Узлы стрельбы (K + 1, абсолютные фазы)
        nodes: (x, y) в узлах (K, 2)
        floquet: Мультипликаторы {1, μ₂, μ₃}
        residual_norm: Невязка стрельбы
        offsets, xy: Выборка орбиты на периоде
        warnings: Записанные предупреждения
    """

    gamma: float
    eps: float
    theta_phase: float
    phases: np.ndarray
    nodes: np.ndarray
    floquet: FloquetData
    residual_norm: float
    offsets: np.ndarray
    xy: np.ndarray
    delta: float
    warnings: List[str] = field(default_factory=list)

    @property
    def segments(self) -> int:
        return len(self.phases) - 1

    @property
    def z0(self) -> State:
        return State(self.nodes[0, 0], self.nodes[0, 1], self.theta_phase)

    @property
    def max_abs_y(self) -> float:
        return float(np.max(np.abs(self.xy[:, 1])))

    @property
    def log_abs_mu3(self) -> float:
        return self.floquet.log_abs_dominant

    @property
    def canard_time(self) -> float:
        """Время на периоде, проведённое в полосе δ < |ŷ| < 1 (ветви C_r±)."""
        yh = np.abs(self.xy[:, 1]) / self.eps
        inside = ((yh > self.delta) & (yh < 1.0)).astype(float)
        return float(trapezoid(inside, self.offsets))

    @property
    def is_canard(self) -> bool:
        return self.canard_time > CANARD_TIME_MIN

    def to_seed(self) -> ShootingSeed:
        return ShootingSeed(self.gamma, self.theta_phase, self.offsets, self.xy)

    def states(self) -> np.ndarray:
        """Выборка (N, 3): x, y, θ ∈ [0, 2π)."""
        th = np.mod(self.theta_phase + self.offsets, TWO_PI)
        return np.column_stack([self.xy, th])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "eps": self.eps,
            "theta_phase": self.theta_phase,
            "z0": [self.nodes[0, 0], self.nodes[0, 1], self.theta_phase],
            "segments": self.segments,
            "residual_norm": self.residual_norm,
            "max_abs_y": self.max_abs_y,
            "canard_time": self.canard_time,
            "log_abs_mu3": self.log_abs_mu3,
            "floquet": self.floquet.to_dict(),
        }


def smooth_seed(sol: SlipStickSolution, p: Params, rp: RegParams, periods: int = 3) -> ShootingSeed:
    """
    Затравка из разрывной орбиты: старт на C_a в точке срыва и несколько периодов
    жёсткого интегрирования; берётся последний период.
    """
    pg = p.with_gamma(sol.gamma)
    start = on_attracting_manifold(sol.x0, sol.theta0, pg, rp)
    traj = stiff_integrate(start, periods * TWO_PI, pg, rp)
    offsets = np.linspace(0.0, TWO_PI, N_SAMPLES + 1)
    z = traj.states_at((periods - 1) * TWO_PI + offsets)
    return ShootingSeed(gamma=sol.gamma, theta_phase=sol.theta0, offsets=offsets, xy=z[:, :2].copy())


def growth_density(xy: np.ndarray, p: Params, rp: RegParams) -> np.ndarray:
    """max(0, −μ_d φ′(y/ε)/ε) по выборке."""
    return np.maximum(0.0, -p.mu_d * np.asarray(rp.phi.d1(xy[:, 1] / rp.eps)) / rp.eps)


def segment_phases(seed: ShootingSeed, p: Params, rp: RegParams, segments: Optional[int] = None) -> np.ndarray:
    """
    Узлы стрельбы. Без явного числа сегментов: один сегмент, если оценка
    роста за период не превышает log 1e8, иначе узлы по квантилям меры
    «рост/LOG_GROWTH_PER_SEGMENT + равномерная часть на 8 сегментов».
    """
    th0 = seed.theta_phase
    if segments is not None:
        return th0 + np.linspace(0.0, TWO_PI, segments + 1)
    dens = growth_density(seed.xy, p, rp)
    growth = float(trapezoid(dens, seed.offsets))
    if growth <= math.log(CONDITIONING_LIMIT):
        return np.array([th0, th0 + TWO_PI])
    w = dens / LOG_GROWTH_PER_SEGMENT + MIN_MULTI_SEGMENTS / TWO_PI
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(seed.offsets))])
    K = int(min(MAX_SEGMENTS, max(MIN_MULTI_SEGMENTS, math.ceil(cum[-1]))))
    targets = np.linspace(0.0, cum[-1], K + 1)
    offs = np.interp(targets, cum, seed.offsets)
    offs[0], offs[-1] = 0.0, TWO_PI
    return th0 + offs


def sample_orbit(
    nodes: np.ndarray, phases: np.ndarray, p: Params, rp: RegParams, n: int = N_SAMPLES
) -> Tuple[np.ndarray, np.ndarray]:
    """Равномерная выборка (x, y) по сегментам сошедшейся орбиты."""
    offsets = np.linspace(0.0, TWO_PI, n + 1)
    abs_th = phases[0] + offsets
    xy = np.empty((offsets.size, 2))
    K = len(phases) - 1
    for k in range(K):
        lo, hi = phases[k], phases[k + 1]
        mask = (abs_th >= lo) & (abs_th <= hi) if k == K - 1 else (abs_th >= lo) & (abs_th < hi)
        if not np.any(mask):
            continue
        start = State(nodes[k, 0], nodes[k, 1], lo)
        traj = stiff_integrate(start, hi - lo, p, rp, tol=SHOOT_RTOL, atol=SHOOT_ATOL)
        xy[mask] = traj.states_at(abs_th[mask] - lo)[:, :2]
    return offsets, xy


def _converge(
    U0: np.ndarray, phases: np.ndarray, p: Params, rp: RegParams, tol: float, label: str
) -> Tuple[np.ndarray, float, List[SegmentFlow]]:
    cache: Dict[bytes, List[SegmentFlow]] = {}

    def func(U: np.ndarray):
        F, J, _, segs = shooting_system(U, phases, p, rp)
        cache[U.tobytes()] = segs
        return F, J

    res = newton_solve(func, U0, tol=tol, label=label)
    segs = cache.get(res.x.tobytes())
    if segs is None:
        segs = shooting_system(res.x, phases, p, rp)[3]
    return res.x, res.residual_norm, segs


def build_orbit(
    U: np.ndarray,
    residual_norm: float,
    segs: List[SegmentFlow],
    phases: np.ndarray,
    p: Params,
    rp: RegParams,
    warnings: Optional[List[str]] = None,
) -> RegularizedOrbit:
    K = len(phases) - 1
    nodes = U.reshape(K, 2).copy()
    offsets, xy = sample_orbit(nodes, phases, p, rp)
    return RegularizedOrbit(
        gamma=p.gamma,
        eps=rp.eps,
        theta_phase=float(phases[0]),
        phases=phases.copy(),
        nodes=nodes,
        floquet=regularized_multipliers(segs),
        residual_norm=residual_norm,
        offsets=offsets,
        xy=xy,
        delta=rp.delta,
        warnings=list(warnings or []),
    )


SeedLike = Union[ShootingSeed, RegularizedOrbit, SlipStickSolution]


def shoot_periodic_regularized(
    seed: SeedLike,
    p: Params,
    rp: RegParams,
    segments: Optional[int] = None,
    tol: float = SHOOT_TOL,
) -> RegularizedOrbit:
    """
    2π-периодическая орбита регуляризованной системы.

    Args:
        seed: Разрывная орбита, предыдущая орбита продолжения или выборка
        p: Параметры (γ берётся из затравки)
        rp: Параметры регуляризации
        segments: Число сегментов (None — по оценке роста)
        tol: Порог невязки Ньютона

    Raises:
        NewtonDivergenceError: если Ньютон не сошёлся
        StepFailureError: при сбое интегратора
    """
    if isinstance(seed, SlipStickSolution):
        seed = smooth_seed(seed, p, rp)
    elif isinstance(seed, RegularizedOrbit):
        seed = seed.to_seed()
    pg = p.with_gamma(seed.gamma)
    warnings: List[str] = []

    phases = segment_phases(seed, pg, rp, segments)
    if len(phases) - 1 >= MIN_MULTI_SEGMENTS and segments is None:
        msg = f"conditioning: expected multiplier above {CONDITIONING_LIMIT:g}, using {len(phases) - 1} segments"
        log.warning(msg)
        warnings.append(msg)
    U0 = seed.at(phases[:-1] - phases[0]).ravel()
    label = f"shoot(gamma={pg.gamma:.6g}, eps={rp.eps:g}, K={len(phases) - 1})"
    U, r, segs = _converge(U0, phases, pg, rp, tol, label)
    orbit = build_orbit(U, r, segs, phases, pg, rp, warnings)

    if orbit.segments < MIN_MULTI_SEGMENTS and orbit.log_abs_mu3 > math.log(CONDITIONING_LIMIT):
        msg = (
            f"conditioning: |mu3| = exp({orbit.log_abs_mu3:.1f}) exceeds {CONDITIONING_LIMIT:g}, "
            "switching to multiple shooting"
        )
        log.warning(msg)
        warnings.append(msg)
        reseed = orbit.to_seed()
        phases = segment_phases(reseed, pg, rp)
        if len(phases) - 1 < MIN_MULTI_SEGMENTS:
            phases = segment_phases(reseed, pg, rp, MIN_MULTI_SEGMENTS)
        U0 = reseed.at(phases[:-1] - phases[0]).ravel()
        U, r, segs = _converge(U0, phases, pg, rp, tol, label)
        orbit = build_orbit(U, r, segs, phases, pg, rp, warnings)

    log.info(
        f"orbit gamma={pg.gamma:.6g} eps={rp.eps:g}: K={orbit.segments}, log|mu3|={orbit.log_abs_mu3:.4g}, "
        f"{orbit.floquet.klass.value}, canard time {orbit.canard_time:.3f}"
    )
    return orbit


__all__ = [
    "SHOOT_TOL",
    "CANARD_TIME_MIN",
    "variational_rhs",
    "variational_jacobian",
    "SegmentFlow",
    "flow_segment",
    "shooting_system",
    "regularized_multipliers",
    "ShootingSeed",
    "RegularizedOrbit",
    "smooth_seed",
    "growth_density",
    "segment_phases",
    "sample_orbit",
    "build_orbit",
    "shoot_periodic_regularized",
]
