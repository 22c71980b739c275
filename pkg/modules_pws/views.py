# modules_pws/views.py
"""
Выгрузка траекторий: CSV выборки и журнал событий в JSON lines.
"""
from __future__ import annotations

import logging
from collections import Counter
from typing import Any, Dict, List, Optional

import pandas as pd

from config_package.json_utils import write_json_lines
from config_package.settings import settings
from modules_model.params import Params
from modules_pws.integrator import Trajectory, is_regular

log = logging.getLogger("stiction-lab.pws.views")

TRAJECTORY_COLUMNS = ["t", "x", "y", "theta", "region_label"]


def trajectory_frame(traj: Trajectory, p: Params) -> pd.DataFrame:
    """Таблица выборки траектории с метками областей."""
    return pd.DataFrame(
        {
            "t": traj.times,
            "x": traj.states[:, 0],
            "y": traj.states[:, 1],
            "theta": traj.states[:, 2],
            "region_label": traj.region_labels(p),
        },
        columns=TRAJECTORY_COLUMNS,
    )


def write_trajectory_csv(traj: Trajectory, p: Params, path: str) -> str:
    df = trajectory_frame(traj, p)
    df.to_csv(path, index=False, float_format=settings.float_format)
    log.info(f"Trajectory with {len(df)} samples written to {path}")
    return path


def event_rows(traj: Trajectory) -> List[Dict[str, Any]]:
    return [e.to_dict() for e in traj.events]


def write_events_jsonl(traj: Trajectory, path: str) -> Optional[str]:
    if not write_json_lines(path, event_rows(traj)):
        return None
    return path


def trajectory_summary(traj: Trajectory, branch_index: Optional[int] = None) -> Dict[str, Any]:
    """Краткая сводка для JSON-отчёта команды simulate."""
    counts = Counter(e.kind.value for e in traj.events)
    end = traj.end_state
    out: Dict[str, Any] = {
        "t_end": traj.t_end,
        "end_state": [end.x, end.y, end.theta],
        "samples": int(len(traj.times)),
        "events": dict(sorted(counts.items())),
        "regular": is_regular(traj),
        "halted": traj.halted,
        "branch_policy": traj.branch_policy_used.value,
    }
    if branch_index is not None:
        out["branch"] = branch_index
    return out


__all__ = [
    "TRAJECTORY_COLUMNS",
    "trajectory_frame",
    "write_trajectory_csv",
    "event_rows",
    "write_events_jsonl",
    "trajectory_summary",
]
