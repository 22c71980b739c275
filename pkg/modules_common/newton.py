# modules_common/newton.py
"""
Демпфированный метод Ньютона с бэктрекингом.

Общий решатель для условий симметричных орбит скольжения-залипания,
стрельбы по периодическим орбитам и корректора псевдодлины дуги.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.linalg import LinAlgError, norm, solve

from modules_common.errors import NewtonDivergenceError

log = logging.getLogger("stiction-lab.newton")

# (F(u), J(u)) для текущего приближения
ResidualFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class NewtonResult:
    """Результат решения F(u) = 0."""

    x: np.ndarray
    residual: np.ndarray
    jacobian: np.ndarray
    residual_norm: float
    iterations: int


def _newton_step(J: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Шаг Ньютона; при вырожденной матрице — регуляризация Тихонова."""
    try:
        return solve(J, -F)
    except LinAlgError:
        lam = 1e-10 * max(1.0, float(norm(J, ord=np.inf)))
        return solve(J.T @ J + lam * np.eye(J.shape[1]), -J.T @ F)


def newton_solve(
    func: ResidualFn,
    x0: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 50,
    label: str = "newton",
    max_backtracks: int = 12,
    step_limit: Optional[float] = None,
) -> NewtonResult:
    """
    Решает F(x) = 0 демпфированным методом Ньютона.

    Args:
        func: Функция, возвращающая (F(x), J(x))
        x0: Начальное приближение
        tol: Порог по норме невязки (бесконечная норма)
        max_iter: Максимум итераций
        label: Метка для логов и диагностики
        max_backtracks: Сколько раз можно делить шаг пополам
        step_limit: Ограничение нормы шага (None — без ограничения)

    Returns:
        NewtonResult с решением, невязкой и якобианом в решении

    Raises:
        NewtonDivergenceError: если невязка не опустилась ниже tol
    """
    x = np.array(x0, dtype=float, copy=True)
    F, J = func(x)
    r = float(norm(F, ord=np.inf))

    for k in range(max_iter):
        if not np.all(np.isfinite(F)):
            raise NewtonDivergenceError(
                f"{label}: non-finite residual", {"iteration": k, "x": x.tolist()}
            )
        if r <= tol:
            log.debug(f"{label}: converged in {k} iterations, |F|={r:.3e}")
            return NewtonResult(x=x, residual=F, jacobian=J, residual_norm=r, iterations=k)

        dx = _newton_step(J, F)
        if step_limit is not None:
            dn = float(norm(dx, ord=np.inf))
            if dn > step_limit:
                dx *= step_limit / dn

        lam = 1.0
        accepted = False
        for _ in range(max_backtracks):
            x_try = x + lam * dx
            try:
                F_try, J_try = func(x_try)
            except (ArithmeticError, ValueError) as e:
                log.debug(f"{label}: trial point rejected ({e}), halving step")
                lam *= 0.5
                continue
            r_try = float(norm(F_try, ord=np.inf))
            if np.isfinite(r_try) and r_try < (1.0 - 1e-4 * lam) * r:
                x, F, J, r = x_try, F_try, J_try, r_try
                accepted = True
                break
            lam *= 0.5

        if not accepted:
            # невязка на уровне округления: дальше не уменьшить
            if r <= 1e3 * tol:
                log.debug(f"{label}: stalled at |F|={r:.3e}, accepting")
                return NewtonResult(x=x, residual=F, jacobian=J, residual_norm=r, iterations=k)
            raise NewtonDivergenceError(
                f"{label}: line search failed at |F|={r:.3e}",
                {"iteration": k, "residual_norm": r, "x": x.tolist()},
            )

    if r <= tol:
        return NewtonResult(x=x, residual=F, jacobian=J, residual_norm=r, iterations=max_iter)
    raise NewtonDivergenceError(
        f"{label}: no convergence in {max_iter} iterations (|F|={r:.3e})",
        {"iterations": max_iter, "residual_norm": r, "x": x.tolist()},
    )


__all__ = ["NewtonResult", "newton_solve", "ResidualFn"]
