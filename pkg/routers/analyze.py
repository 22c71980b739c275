"""
Команда analyze: φ, свёрнутые особенности, утки, граница по γ, близость
решений, цикл залипания, трансверсальность и проверка взрыва уток.
"""
from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional, Tuple

from config_package.constants import BranchLabel, CanardKind
from modules_common.errors import StictionError
from modules_common.paths import shard_dir
from modules_model.params import State
from modules_orbits.diagnostics import (
    MultiplierScan,
    canard_multiplier_scan,
    no_canard_explosion_check,
    transversality_check,
)
from modules_orbits.regularized_branch import continue_branch_regularized
from modules_regularization.canards import maximal_canard, singular_canard
from modules_regularization.folds import (
    folded_saddles,
    folded_singularities,
    gamma_upper_bound,
    locate_saddle_node_collision,
)
from modules_regularization.stiff import closeness_study, sticking_limit_cycle
from routers.run_config import RunConfig, add_common_flags

log = logging.getLogger("stiction-lab.cli.analyze")

COMMAND = "analyze"

DEFAULT_CLOSENESS_EPS = [1e-4, 3e-4, 1e-3, 3e-3]
DEFAULT_SCAN_EPS = [2e-3, 1e-3, 5e-4]
EXPLOSION_SEED_GAMMA = 5.0


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(COMMAND, help="проверки и отчёты")
    add_common_flags(parser)
    parser.add_argument("--phi", action="store_true", help="коэффициенты φ и невязки условий")
    parser.add_argument("--folded-singularities", dest="folded_singularities", action="store_true")
    parser.add_argument("--gamma-bound", dest="gamma_bound", action="store_true")
    parser.add_argument("--singular-canard", dest="singular_canard", action="store_true")
    parser.add_argument("--maximal-canard", dest="maximal_canard", action="store_true")
    parser.add_argument("--sticking-cycle", dest="sticking_cycle", action="store_true")
    parser.add_argument("--closeness", action="store_true", help="d(ε) из (--x0, --y0, --theta0) на [0, T]")
    parser.add_argument("--x0", type=float)
    parser.add_argument("--y0", type=float)
    parser.add_argument("--theta0", type=float)
    parser.add_argument("--T", dest="T", type=float)
    parser.add_argument("--transversality", help="γ через запятую")
    parser.add_argument("--explosion", action="store_true", help="семейство Π_ε и рост μ₃ по 1/ε")
    parser.add_argument("--gamma-range", dest="gamma_range", help="a:b — диапазон продолжения Π_ε")
    parser.add_argument("--seed-gamma", dest="seed_gamma", type=float)
    parser.set_defaults(handler=cmd_analyze)


# ===== Отдельные отчёты =====


def _phi(cfg: RunConfig) -> Dict[str, Any]:
    rp = cfg.reg_params()
    phi = rp.phi
    return {
        "coefficients": list(phi.coefficients),
        "delta": phi.delta,
        "ratio": phi.ratio,
        "conditions_residual": [float(v) for v in phi.conditions_residual()],
        "d2_at_delta": float(phi.d2(phi.delta)),
    }


def _gamma_bound(cfg: RunConfig) -> Dict[str, float]:
    rp = cfg.reg_params()
    Gamma_star, gamma_star = locate_saddle_node_collision(cfg.params(), rp)
    return {
        "gamma_upper_bound": gamma_upper_bound(rp),
        "Gamma_collision": Gamma_star,
        "gamma_collision": gamma_star,
        "Gamma_delta": Gamma_star * rp.delta,
    }


def _canards(cfg: RunConfig, maximal: bool, warnings: List[str]) -> List[Dict[str, Any]]:
    p, rp = cfg.params(), cfg.reg_params()
    out: List[Dict[str, Any]] = []
    for saddle in folded_saddles(p, rp):
        if maximal:
            mc = maximal_canard(saddle, p, rp)
            warnings.extend(mc.warnings)
            out.append(mc.to_dict())
            continue
        for kind in (CanardKind.SINGULAR_VRAI, CanardKind.SINGULAR_FAUX):
            out.append(singular_canard(saddle, kind, p, rp).to_dict())
    return out


def _closeness(cfg: RunConfig, warnings: List[str]) -> Dict[str, Any]:
    eps_list = cfg.eps_list or DEFAULT_CLOSENESS_EPS
    study = closeness_study(
        State(cfg.x0, cfg.y0, cfg.theta0),
        cfg.T,
        cfg.params(),
        cfg.reg_params(),
        eps_list,
        workers=cfg.pool_size,
        shard_dir=shard_dir(cfg.runs_dir(), f"{COMMAND}_closeness"),
    )
    warnings.extend(study.warnings)
    return study.to_dict()


def _transversality(cfg: RunConfig, warnings: List[str]) -> List[Dict[str, Any]]:
    rows: List[Dict[str, Any]] = []
    for g in cfg.transversality:
        try:
            rows.append(transversality_check(g, cfg.params()).to_dict())
        except StictionError as e:
            warnings.append(f"transversality at gamma={g:g}: {e.message}")
            rows.append({"gamma": g, "error": e.to_payload()})
    return rows


def _scan_point(branch_points: List[Any], cfg: RunConfig, warnings: List[str]) -> Optional[MultiplierScan]:
    if not branch_points:
        return None
    mid = branch_points[len(branch_points) // 2].orbit
    try:
        return canard_multiplier_scan(mid, cfg.eps_list or DEFAULT_SCAN_EPS, cfg.params(), cfg.reg_params())
    except StictionError as e:
        warnings.append(f"multiplier scan at gamma={mid.gamma:.6g} failed: {e.message}")
        return None


def _explosion(cfg: RunConfig, warnings: List[str]) -> Dict[str, Any]:
    p, rp = cfg.params(), cfg.reg_params()
    rng = cfg.gamma_range or (0.3, 1.1 * gamma_upper_bound(rp))
    branch = continue_branch_regularized(p, rp, rng, seed_gamma=cfg.seed_gamma or EXPLOSION_SEED_GAMMA)
    scan = _scan_point(branch.labelled(BranchLabel.PIEPS_CENTER), cfg, warnings)
    regular_scan = _scan_point(branch.labelled(BranchLabel.PIEPS_RIGHT), cfg, warnings)
    report = no_canard_explosion_check(branch, scan, regular_scan)
    warnings.extend(report.warnings)
    return {
        "branch": branch.summary(),
        "report": report.to_dict(),
        "canard_scan": scan.to_dict() if scan else None,
        "regular_scan": regular_scan.to_dict() if regular_scan else None,
        "gamma_upper_bound": gamma_upper_bound(rp),
        "fold_below_bound": all(g < gamma_upper_bound(rp) for g in branch.fold_gammas),
    }


# ===== Команда =====


def cmd_analyze(cfg: RunConfig) -> Tuple[Dict[str, Any], List[str]]:
    warnings: List[str] = []
    results: Dict[str, Any] = {}
    if cfg.phi:
        results["phi"] = _phi(cfg)
    if cfg.folded_singularities:
        results["folded_singularities"] = [c.to_dict() for c in folded_singularities(cfg.params(), cfg.reg_params())]
    if cfg.gamma_bound:
        results["gamma_bound"] = _gamma_bound(cfg)
    if cfg.singular_canard:
        results["singular_canards"] = _canards(cfg, False, warnings)
    if cfg.maximal_canard:
        results["maximal_canards"] = _canards(cfg, True, warnings)
    if cfg.sticking_cycle:
        results["sticking_cycle"] = sticking_limit_cycle(cfg.params(), cfg.reg_params()).to_dict()
    if cfg.closeness:
        results["closeness"] = _closeness(cfg, warnings)
    if cfg.transversality:
        results["transversality"] = _transversality(cfg, warnings)
    if cfg.explosion:
        results["explosion"] = _explosion(cfg, warnings)
    if not results:
        warnings.append("nothing to analyze: pass at least one analysis flag")
    return results, warnings


__all__ = ["register", "cmd_analyze"]
