# modules_regularization/views.py
"""
Таблицы регуляризованной задачи: выборки критического многообразия и уток.
"""
from __future__ import annotations

import logging
from typing import List

import numpy as np
import pandas as pd

from config_package.settings import settings
from modules_model.params import Params
from modules_regularization.canards import CanardSegment
from modules_regularization.phi import RegParams
from modules_regularization.slow_fast import critical_manifold_roots
from modules_regularization.stiff import RegTrajectory

log = logging.getLogger("stiction-lab.reg.views")

SAMPLE_COLUMNS = ["xi", "yh", "theta", "branch"]


def critical_manifold_frame(p: Params, rp: RegParams, n: int = 401) -> pd.DataFrame:
    """Все ветви C₀ на сетке ξ ∈ [−μ_s, μ_s] (θ не входит в уравнение C₀)."""
    rows: List[dict] = []
    for v in np.linspace(-p.mu_s, p.mu_s, n):
        for root in critical_manifold_roots(float(v), p, rp):
            rows.append({"xi": float(v), "yh": root.yh, "theta": np.nan, "branch": root.branch.value})
    return pd.DataFrame(rows, columns=SAMPLE_COLUMNS)


def canard_frame(segment: CanardSegment) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "xi": segment.xi,
            "yh": segment.yh,
            "theta": segment.theta,
            "branch": [b.value for b in segment.branches],
        },
        columns=SAMPLE_COLUMNS,
    )


def reg_trajectory_frame(traj: RegTrajectory, rp: RegParams, dt: float) -> pd.DataFrame:
    """Выборка регуляризованной траектории с равным шагом; θ приведена к [0, 2π)."""
    t_end = traj.t_end
    ts = np.arange(0.0, t_end, dt) if t_end > 0 else np.arange(0.0, t_end, -dt)
    ts = np.append(ts, t_end)
    z = traj.states_at(ts)
    return pd.DataFrame(
        {
            "t": ts,
            "x": z[:, 0],
            "y": z[:, 1],
            "theta": np.mod(z[:, 2], 2.0 * np.pi),
            "yh": z[:, 1] / rp.eps,
        }
    )


def write_frame(df: pd.DataFrame, path: str) -> str:
    df.to_csv(path, index=False, float_format=settings.float_format)
    log.info(f"{len(df)} rows written to {path}")
    return path


__all__ = ["SAMPLE_COLUMNS", "critical_manifold_frame", "canard_frame", "reg_trajectory_frame", "write_frame"]
