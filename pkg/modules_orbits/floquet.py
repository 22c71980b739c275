# modules_orbits/floquet.py
"""
Мультипликаторы Флоке периодических орбит.

Для разрывной орбиты скольжения-залипания матрица монодромии собирается из
аналитических матриц дуг скольжения и матриц скачка (saltation) на переходах:

    S = I + (Z_после − Z_до) ∇hᵀ / (∇h · Z_до)

Приземление (h = y, принимающее поле — залипание) даёт S = diag(1, 0, 1):
вариация по y гасится, отсюда структурный нулевой мультипликатор. Дуга
залипания на (x, θ) действует тождественно. Срыв на ∂Σ_c± (h = γ²x + sin θ ∓ μ_s)
добавляет скачок ±(μ_s − μ_d) в y-компоненте.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np

from config_package.constants import FloquetClass
from modules_common.errors import DegenerateTransitionError
from modules_model.params import Params
from modules_orbits.slipstick import SlipStickSolution, symmetry_map
from modules_pws.slip_flow import SlipArc, slip_flow_jacobian

log = logging.getLogger("stiction-lab.orbits.floquet")

# порог трансверсальности переходов
TRANSVERSAL_TOL = 1e-10
# ширина полосы |μ| ≈ 1 для вырожденного случая
NEUTRAL_TOL = 1e-8
# log 1e308
LOG_FLOAT_MAX = 709.0


@dataclass(frozen=True)
class FloquetData:
    """
    Мультипликаторы и устойчивость.

    Attributes:
        multipliers: Три мультипликатора (тривиальный первым)
        klass: Класс устойчивости по нетривиальным мультипликаторам
        log_abs: log|μ| для каждого мультипликатора (−inf для нуля)
    """

    multipliers: tuple
    klass: FloquetClass
    log_abs: tuple = field(default=())

    @property
    def dominant(self) -> complex:
        """Нетривиальный мультипликатор наибольшего модуля."""
        rest = list(self.multipliers[1:])
        logs = list(self.log_abs[1:]) if self.log_abs else [math.log(abs(m)) if m != 0 else -math.inf for m in rest]
        return rest[int(np.argmax(logs))]

    @property
    def log_abs_dominant(self) -> float:
        if not self.log_abs:
            return math.log(abs(self.dominant)) if self.dominant != 0 else -math.inf
        return float(max(self.log_abs[1:]))

    @property
    def stable(self) -> bool:
        return self.klass is FloquetClass.ATTRACTING

    def to_dict(self) -> Dict[str, Any]:
        return {
            "multipliers": [[float(np.real(m)), float(np.imag(m))] for m in self.multipliers],
            "log_abs": [float(v) for v in self.log_abs],
            "classification": self.klass.value,
        }


def classify_multipliers(nontrivial: Sequence[float], tol: float = NEUTRAL_TOL) -> FloquetClass:
    """Класс по log|μ| нетривиальных мультипликаторов."""
    if any(abs(v) <= tol for v in nontrivial):
        return FloquetClass.DEGENERATE
    if all(v < 0.0 for v in nontrivial):
        return FloquetClass.ATTRACTING
    if all(v > 0.0 for v in nontrivial):
        return FloquetClass.REPELLING
    return FloquetClass.SADDLE


def _safe_log(m: complex) -> float:
    a = abs(m)
    return math.log(a) if a > 0.0 else -math.inf


def floquet_from_matrix(M: np.ndarray, structural_zero: bool = False) -> FloquetData:
    """
    Мультипликаторы из матрицы монодромии автономного потока.

    Тривиальный мультипликатор — ближайший к 1. При structural_zero ноль
    исключается из классификации.
    """
    eig = np.linalg.eigvals(M)
    i1 = int(np.argmin(np.abs(eig - 1.0)))
    rest = [complex(m) for k, m in enumerate(eig) if k != i1]
    rest.sort(key=abs)
    mults = (complex(eig[i1]), *rest)
    logs = tuple(_safe_log(m) for m in mults)
    considered = list(logs[1:])
    if structural_zero:
        considered = considered[1:]
    return FloquetData(multipliers=mults, klass=classify_multipliers(considered), log_abs=logs)


# ── Разрывные орбиты ────────────────────────────────────────────────────────


def landing_saltation() -> np.ndarray:
    """Скачок при переходе скольжение → залипание на y = 0."""
    return np.diag([1.0, 0.0, 1.0])


def exit_saltation(theta: float, boundary_sign: int, p: Params) -> np.ndarray:
    """
    Скачок при срыве с ∂Σ_c± (boundary_sign = +1 для ∂Σ_c⁺, −1 для ∂Σ_c⁻).

    Raises:
        DegenerateTransitionError: если поле залипания касается границы (cos θ = 0)
    """
    c = math.cos(theta)
    if abs(c) <= TRANSVERSAL_TOL:
        raise DegenerateTransitionError(
            f"stick exit is tangential at theta={theta:.12g}", {"theta": theta, "cos_theta": c}
        )
    jump = np.array([0.0, boundary_sign * (p.mu_s - p.mu_d), 0.0])
    grad = np.array([p.gamma2, 0.0, c])
    return np.eye(3) + np.outer(jump, grad) / c


def _check_landing(arc: SlipArc, t: float, theta: float) -> None:
    ydot = float(arc.ydot(np.array(t)))
    if abs(ydot) <= TRANSVERSAL_TOL:
        raise DegenerateTransitionError(
            f"slip arc lands tangentially at theta={theta:.12g}", {"theta": theta, "ydot": ydot}
        )


def monodromy_discontinuous(sol: SlipStickSolution, p: Optional[Params] = None) -> np.ndarray:
    """
    Матрица монодромии орбиты от срыва в z0 за период.

    M = S_выход(∂Σ_c⁻) · S_пр · Φ_B · S_выход(∂Σ_c⁺) · S_пр · Φ_A, где Φ_A, Φ_B —
    матрицы дуг скольжения вниз и вверх, S_пр — приземление.
    """
    pg = sol.params if p is None else p.with_gamma(sol.gamma)
    t_s = sol.slip_time
    z0 = sol.z0
    z0_up = symmetry_map(z0)

    _check_landing(SlipArc.build(z0, -1, pg), t_s, z0.theta + t_s)
    _check_landing(SlipArc.build(z0_up, 1, pg), t_s, z0_up.theta + t_s)

    phi_a = slip_flow_jacobian(z0, -1, pg, t_s)
    phi_b = slip_flow_jacobian(z0_up, 1, pg, t_s)
    land = landing_saltation()
    exit_up = exit_saltation(sol.theta0 + math.pi, 1, pg)
    exit_down = exit_saltation(sol.theta0, -1, pg)
    return exit_down @ land @ phi_b @ exit_up @ land @ phi_a


def floquet_discontinuous(sol: SlipStickSolution, p: Optional[Params] = None) -> FloquetData:
    """
    Мультипликаторы {1, 0, λ} орбиты скольжения-залипания.

    Raises:
        DegenerateTransitionError: на касательных переходах
    """
    M = monodromy_discontinuous(sol, p)
    data = floquet_from_matrix(M, structural_zero=True)
    lam = data.multipliers[2]
    # след M = 1 + 0 + λ
    trace_gap = abs(complex(np.trace(M)) - 1.0 - lam)
    if trace_gap > 1e-8 * max(1.0, abs(lam)):
        log.warning(f"monodromy spectrum inconsistent with its trace at gamma={sol.gamma:.6g}: {trace_gap:.2e}")
    log.debug(f"floquet gamma={sol.gamma:.6g}: lambda={lam:.6g} ({data.klass.value})")
    return data


__all__ = [
    "LOG_FLOAT_MAX",
    "FloquetData",
    "classify_multipliers",
    "floquet_from_matrix",
    "landing_saltation",
    "exit_saltation",
    "monodromy_discontinuous",
    "floquet_discontinuous",
]
