# modules_orbits/views.py
"""
Выгрузка семейств орбит и отдельных орбит в CSV.
"""
from __future__ import annotations

import logging
import math
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from config_package.constants import RegionLabel
from config_package.settings import settings
from modules_orbits.continuation import OrbitBranch, OrbitPoint
from modules_orbits.shooting import RegularizedOrbit
from modules_orbits.slipstick import SlipStickSolution

log = logging.getLogger("stiction-lab.orbits.views")

BRANCH_COLUMNS = [
    "gamma",
    "theta0",
    "theta_star",
    "x0",
    "maxAbsY",
    "reLambda",
    "imLambda",
    "logAbsLambda",
    "stability",
    "branchLabel",
]

# |y| < ε: внутри слоя регуляризации
BOUNDARY_LAYER = "boundary_layer"


def _finite(v: float) -> float:
    return float(v) if math.isfinite(v) else math.nan


def branch_row(pt: OrbitPoint, branch: OrbitBranch) -> Dict[str, Any]:
    """
    Строка таблицы семейства.

    Для разрывной орбиты λ — нетривиальный ненулевой мультипликатор, для
    регуляризованной — μ₃; θ0 регуляризованной орбиты — фаза начала стрельбы.
    """
    orbit = pt.orbit
    if isinstance(orbit, SlipStickSolution):
        theta0, theta_star, x0 = orbit.theta0, orbit.theta_star, orbit.x0
    elif isinstance(orbit, RegularizedOrbit):
        theta0, theta_star, x0 = orbit.theta_phase, math.nan, float(orbit.nodes[0, 0])
    else:
        theta0 = theta_star = x0 = math.nan
    label = pt.label or branch.label
    if pt.floquet is not None:
        lam = pt.floquet.dominant
        re, im = _finite(np.real(lam)), _finite(np.imag(lam))
        log_abs = pt.floquet.log_abs_dominant
        stability = pt.floquet.klass.value
    else:
        re = im = log_abs = math.nan
        stability = ""
    return {
        "gamma": pt.gamma,
        "theta0": theta0,
        "theta_star": theta_star,
        "x0": x0,
        "maxAbsY": pt.max_abs_y,
        "reLambda": re,
        "imLambda": im,
        "logAbsLambda": log_abs,
        "stability": stability,
        "branchLabel": label.value if label else "",
    }


def branch_frame(branches: List[OrbitBranch]) -> pd.DataFrame:
    rows = [branch_row(pt, br) for br in branches for pt in br.points]
    return pd.DataFrame(rows, columns=BRANCH_COLUMNS)


def write_branch_csv(branches: List[OrbitBranch], path: str) -> str:
    df = branch_frame(branches)
    df.to_csv(path, index=False, float_format=settings.float_format)
    log.info(f"{len(df)} orbits from {len(branches)} branches written to {path}")
    return path


def reg_orbit_frame(orbit: RegularizedOrbit) -> pd.DataFrame:
    """Выборка регуляризованной орбиты в формате траекторий (t отсчитывается от фазы начала)."""
    z = orbit.states()
    yh = z[:, 1] / orbit.eps
    return pd.DataFrame(
        {
            "t": orbit.offsets,
            "x": z[:, 0],
            "y": z[:, 1],
            "theta": z[:, 2],
            "region_label": np.where(
                np.abs(yh) < 1.0,
                BOUNDARY_LAYER,
                np.where(yh > 0, RegionLabel.G_PLUS.value, RegionLabel.G_MINUS.value),
            ),
        }
    )


def write_reg_orbit_csv(orbit: RegularizedOrbit, path: str) -> str:
    df = reg_orbit_frame(orbit)
    df.to_csv(path, index=False, float_format=settings.float_format)
    log.info(f"regularized orbit at gamma={orbit.gamma:.6g} written to {path}")
    return path


__all__ = [
    "BRANCH_COLUMNS",
    "branch_row",
    "branch_frame",
    "write_branch_csv",
    "reg_orbit_frame",
    "write_reg_orbit_csv",
]
