"""
Команда simulate: траектория разрывной системы (событийный интегратор) или
регуляризованной системы (Radau); прогон по x0 через пул воркеров.
"""
from __future__ import annotations

import argparse
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config_package.constants import BranchPolicy, SimulationMode
from config_package.json_utils import safe_write_json
from modules_common.paths import run_file, shard_dir
from modules_common.pool import run_sweep
from modules_model.params import Params, State
from modules_pws.integrator import StictionTree, Trajectory, integrate_stiction
from modules_pws.views import trajectory_summary, write_events_jsonl, write_trajectory_csv
from modules_regularization.phi import RegParams
from modules_regularization.stiff import stiff_integrate
from modules_regularization.views import reg_trajectory_frame, write_frame
from routers.run_config import RunConfig, add_common_flags

log = logging.getLogger("stiction-lab.cli.simulate")

COMMAND = "simulate"


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(COMMAND, help="траектория из начальной точки")
    add_common_flags(parser)
    parser.add_argument("--mode", choices=[m.value for m in SimulationMode])
    parser.add_argument("--policy", choices=["stick", "slip", "enumerate"])
    parser.add_argument("--x0", type=float)
    parser.add_argument("--y0", type=float)
    parser.add_argument("--theta0", type=float)
    parser.add_argument("--T", dest="T", type=float, help="длительность")
    parser.add_argument("--sample-dt", dest="sample_dt", type=float)
    parser.add_argument("--sweep-x0", dest="sweep_x0", help="a:b:n — прогон по x0")
    parser.set_defaults(handler=cmd_simulate)


# ===== Один прогон =====


def _write_pws(traj: Trajectory, p: Params, out_dir: str, name: str) -> Dict[str, Any]:
    csv = write_trajectory_csv(traj, p, run_file(out_dir, COMMAND, name, "csv"))
    events = write_events_jsonl(traj, run_file(out_dir, COMMAND, f"{name}_events", "jsonl"))
    return {"csv": csv, "events": events}


def simulate_one(item: Dict[str, Any]) -> Dict[str, Any]:
    """
    Прогон из одной начальной точки. Функция верхнего уровня, чтобы её можно
    было отдать пулу процессов.
    """
    z0: State = item["z0"]
    T: float = item["T"]
    p: Params = item["p"]
    mode: SimulationMode = item["mode"]
    out_dir: str = item["out_dir"]
    name: str = item["name"]

    if mode is SimulationMode.REG:
        rp: RegParams = item["rp"]
        traj = stiff_integrate(z0, T, p, rp)
        path = write_frame(reg_trajectory_frame(traj, rp, item["sample_dt"]), run_file(out_dir, COMMAND, name, "csv"))
        end = traj.end_state
        return {
            "mode": mode.value,
            "branches": 1,
            "forks": 0,
            "files": [{"csv": path, "events": None}],
            "summaries": [{"t_end": traj.t_end, "end_state": [end.x, end.y, end.theta]}],
            "warnings": list(traj.warnings),
        }

    policy: BranchPolicy = item["policy"]
    res = integrate_stiction(z0, T, policy, p, sample_dt=item["sample_dt"])
    if isinstance(res, StictionTree):
        branches = res.branches()
        files = [_write_pws(tr, p, out_dir, f"{name}_branch{i:02d}") for i, tr in enumerate(branches)]
        summaries = [trajectory_summary(tr, i) for i, tr in enumerate(branches)]
        manifest: Optional[str] = run_file(out_dir, COMMAND, f"{name}_forks", "json")
        warnings = [w for tr in branches for w in tr.warnings]
        if not safe_write_json(
            manifest,
            {"z0": z0.as_tuple(), "T": T, "forks": res.forks, "branches": summaries, "files": files},
        ):
            warnings.append(f"forks manifest {manifest} was not written")
            manifest = None
        return {
            "mode": mode.value,
            "branches": len(branches),
            "forks": res.forks,
            "files": files,
            "summaries": summaries,
            "manifest": manifest,
            "warnings": warnings,
        }

    return {
        "mode": mode.value,
        "branches": 1,
        "forks": 0,
        "files": [_write_pws(res, p, out_dir, name)],
        "summaries": [trajectory_summary(res)],
        "warnings": list(res.warnings),
    }


def _item(cfg: RunConfig, z0: State, out_dir: str, name: str) -> Dict[str, Any]:
    item: Dict[str, Any] = {
        "z0": z0,
        "T": cfg.T,
        "p": cfg.params(),
        "mode": cfg.mode,
        "policy": cfg.policy,
        "sample_dt": cfg.sample_dt,
        "out_dir": out_dir,
        "name": name,
    }
    if cfg.mode is SimulationMode.REG:
        item["rp"] = cfg.reg_params()
    return item


# ===== Команда =====


def cmd_simulate(cfg: RunConfig) -> Tuple[Dict[str, Any], List[str]]:
    """
    Returns:
        (results, warnings)
    """
    out_dir = cfg.runs_dir()
    if cfg.sweep_x0 is None:
        z0 = State(cfg.x0, cfg.y0, cfg.theta0)
        result = simulate_one(_item(cfg, z0, out_dir, cfg.mode.value))
        warnings = result.pop("warnings")
        log.info(f"simulate {cfg.mode.value}: {result['branches']} branch(es), {result['forks']} fork(s)")
        return result, warnings

    a, b, n = cfg.sweep_x0
    xs = np.linspace(a, b, n)
    items = [_item(cfg, State(float(x), cfg.y0, cfg.theta0), out_dir, f"{cfg.mode.value}_x{i:04d}") for i, x in enumerate(xs)]
    outcomes = run_sweep(simulate_one, items, workers=cfg.pool_size, shard_dir=shard_dir(out_dir, COMMAND))
    rows: List[Dict[str, Any]] = []
    warnings: List[str] = []
    for o in outcomes:
        row: Dict[str, Any] = {"x0": float(xs[o.index]), "ok": o.ok}
        if o.ok and o.result is not None:
            warnings.extend(o.result.pop("warnings", []))
            row.update(o.result)
        else:
            row["error"] = o.error
            warnings.append(f"x0={xs[o.index]:.6g}: {(o.error or {}).get('message')}")
        rows.append(row)
    log.info(f"simulate sweep over {n} initial positions: {sum(r['ok'] for r in rows)} succeeded")
    return {"mode": cfg.mode.value, "sweep": rows}, warnings


__all__ = ["register", "simulate_one", "cmd_simulate"]
