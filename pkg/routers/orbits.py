"""
Команда orbits: орбиты скольжения-залипания разрывной системы (Π₀) и
семейство регуляризованных орбит (Π_ε).
"""
from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from modules_common.errors import DegenerateTransitionError, NewtonDivergenceError
from modules_common.paths import run_file, shard_dir
from modules_common.pool import run_sweep
from modules_model.params import Params
from modules_orbits.continuation import OrbitBranch, trace_pws_branches
from modules_orbits.floquet import floquet_discontinuous
from modules_orbits.regularized_branch import continue_branch_regularized, orbits_at_gamma
from modules_orbits.slipstick import SlipStickSolution, assemble_full_orbit, seed_slipstick
from modules_orbits.views import write_branch_csv, write_reg_orbit_csv
from modules_pws.views import write_trajectory_csv
from modules_regularization.folds import gamma_upper_bound
from modules_regularization.phi import RegParams
from routers.run_config import RunConfig, add_common_flags

log = logging.getLogger("stiction-lab.cli.orbits")

COMMAND = "orbits"

# затравка Π_ε по умолчанию: регулярная орбита Π₀^r
DEFAULT_SEED_GAMMA = 5.0
DEFAULT_REG_GAMMA_MIN = 0.3


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(COMMAND, help="периодические орбиты и их семейства")
    add_common_flags(parser)
    parser.add_argument("--pws", action="store_true", help="разрывная система (Π₀)")
    parser.add_argument("--reg", action="store_true", help="регуляризованная система (Π_ε)")
    parser.add_argument("--gamma-range", dest="gamma_range", help="a:b — продолжение по γ")
    parser.add_argument("--gamma-grid", dest="gamma_grid", help="a:b:n — решение на сетке γ через пул")
    parser.add_argument("--trace-canard", dest="trace_canard", action="store_true")
    parser.add_argument("--seed-gamma", dest="seed_gamma", type=float)
    parser.set_defaults(handler=cmd_orbits)


# ===== Π₀ =====


def _solution_row(sol: SlipStickSolution) -> Dict[str, Any]:
    row = sol.to_dict()
    try:
        row["floquet"] = floquet_discontinuous(sol).to_dict()
    except DegenerateTransitionError as e:
        row["floquet"] = None
        row["floquet_error"] = e.message
    return row


def solve_gamma_item(item: Dict[str, Any]) -> Dict[str, Any]:
    """Все допустимые орбиты при одном γ (для пула)."""
    sols = seed_slipstick(item["gamma"], item["p"])
    return {"gamma": item["gamma"], "orbits": [_solution_row(s) for s in sols]}


def _pws(cfg: RunConfig, out_dir: str, warnings: List[str]) -> Dict[str, Any]:
    p = cfg.params()
    if cfg.gamma_grid is not None:
        a, b, n = cfg.gamma_grid
        gammas = np.linspace(a, b, n)
        items = [{"gamma": float(g), "p": p} for g in gammas]
        outcomes = run_sweep(solve_gamma_item, items, workers=cfg.pool_size, shard_dir=shard_dir(out_dir, COMMAND))
        grid: List[Dict[str, Any]] = []
        for o in outcomes:
            if o.ok and o.result is not None:
                grid.append(o.result)
            else:
                grid.append({"gamma": float(gammas[o.index]), "orbits": [], "error": o.error})
                warnings.append(f"gamma={gammas[o.index]:.6g}: {(o.error or {}).get('message')}")
        return {"grid": grid}

    if cfg.gamma_range is not None:
        branches = trace_pws_branches(cfg.gamma_range, p)
        path = write_branch_csv(branches, run_file(out_dir, COMMAND, "pws_branches", "csv"))
        return {"branches": [b.summary() for b in branches], "branch_csv": path}

    sols = seed_slipstick(cfg.gamma, p)
    if not sols:
        raise NewtonDivergenceError(f"no admissible slip-stick orbit at gamma={cfg.gamma}", {"gamma": cfg.gamma})
    files: List[str] = []
    for i, sol in enumerate(sols):
        traj = assemble_full_orbit(sol)
        files.append(write_trajectory_csv(traj, sol.params, run_file(out_dir, COMMAND, f"pws_orbit{i:02d}", "csv")))
    return {"orbits": [_solution_row(s) for s in sols], "orbit_files": files}


# ===== Π_ε =====


def _reg_range(cfg: RunConfig, rp: RegParams) -> Tuple[float, float]:
    if cfg.gamma_range is not None:
        return cfg.gamma_range
    return DEFAULT_REG_GAMMA_MIN, 1.1 * gamma_upper_bound(rp)


def _reg_branch(cfg: RunConfig, p: Params, rp: RegParams) -> OrbitBranch:
    seed_gamma: Optional[float] = cfg.seed_gamma or DEFAULT_SEED_GAMMA
    return continue_branch_regularized(p, rp, _reg_range(cfg, rp), seed_gamma=seed_gamma)


def _reg(cfg: RunConfig, out_dir: str, warnings: List[str]) -> Dict[str, Any]:
    p = cfg.params()
    rp = cfg.reg_params()
    branch = _reg_branch(cfg, p, rp)
    for pt in branch.points:
        warnings.extend(pt.orbit.warnings)
    path = write_branch_csv([branch], run_file(out_dir, COMMAND, f"reg_branch_eps{rp.eps:g}", "csv"))
    results: Dict[str, Any] = {"branches": [branch.summary()], "branch_csv": path}

    if not cfg.trace_canard and cfg.gamma_range is None:
        # одиночное γ: все орбиты семейства при этом γ
        found = orbits_at_gamma(branch, cfg.gamma, p, rp)
        results["coexisting"] = [{**o.to_dict(), "is_canard": o.is_canard} for o in found]
        results["orbit_files"] = [
            write_reg_orbit_csv(o, run_file(out_dir, COMMAND, f"reg_orbit_g{cfg.gamma:g}_{i:02d}", "csv"))
            for i, o in enumerate(found)
        ]
        log.info(f"{len(found)} coexisting orbits at gamma={cfg.gamma:g}")
    return results


# ===== Команда =====


def cmd_orbits(cfg: RunConfig) -> Tuple[Dict[str, Any], List[str]]:
    out_dir = cfg.runs_dir()
    warnings: List[str] = []
    results: Dict[str, Any] = {}
    run_pws = cfg.pws or not cfg.reg
    if run_pws:
        results["pws"] = _pws(cfg, out_dir, warnings)
    if cfg.reg:
        results["reg"] = _reg(cfg, out_dir, warnings)
    return results, warnings


__all__ = ["register", "solve_gamma_item", "cmd_orbits"]
