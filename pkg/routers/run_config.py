"""
Конфигурация запуска команды.

Порядок слияния: умолчания из Settings → JSON-файл (--config) → явные флаги.
"""
from __future__ import annotations

import argparse
import logging
import os
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config_package.constants import BranchPolicy, SimulationMode
from config_package.json_utils import safe_read_json
from config_package.settings import settings
from modules_common.errors import ConfigError
from modules_common.paths import resolve_runs_dir
from modules_model.params import Params
from modules_regularization.phi import RegParams

log = logging.getLogger("stiction-lab.cli.config")


# ===== Разбор значений флагов =====


def parse_range(text: str) -> Tuple[float, float]:
    """"a:b" → (a, b)."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"expected a:b, got {text!r}")
    return float(parts[0]), float(parts[1])


def parse_grid(text: str) -> Tuple[float, float, int]:
    """"a:b:n" → (a, b, n)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected a:b:n, got {text!r}")
    return float(parts[0]), float(parts[1]), int(parts[2])


def parse_floats(text: str) -> List[float]:
    """"1e-4,3e-4" → [1e-4, 3e-4]."""
    return [float(v) for v in text.split(",") if v.strip()]


# ===== RunConfig =====


class RunConfig(BaseModel):
    """Проверенные параметры одной команды."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str

    # модель
    mu_s: float = Field(default_factory=lambda: settings.mu_s, gt=0)
    mu_d: float = Field(default_factory=lambda: settings.mu_d, gt=0)
    gamma: float = Field(default_factory=lambda: settings.gamma, gt=0)

    # регуляризация
    eps: float = Field(default_factory=lambda: settings.eps, gt=0, le=0.1)
    eps_list: List[float] = Field(default_factory=list)
    delta: float = Field(default_factory=lambda: settings.delta, gt=0, lt=1)

    # вывод и пул
    out_dir: Optional[str] = None
    workers: int = Field(default_factory=lambda: settings.workers, ge=0, description="0 = число ядер")

    # simulate
    mode: SimulationMode = SimulationMode.PWS
    policy: BranchPolicy = BranchPolicy.STICK_FIRST
    x0: float = 0.0
    y0: float = 0.0
    theta0: float = 0.0
    T: float = Field(default=12.566370614359172, gt=0)
    sample_dt: float = Field(default_factory=lambda: settings.sample_dt, gt=0)
    sweep_x0: Optional[Tuple[float, float, int]] = None

    # orbits
    pws: bool = False
    reg: bool = False
    gamma_range: Optional[Tuple[float, float]] = None
    gamma_grid: Optional[Tuple[float, float, int]] = None
    trace_canard: bool = False
    seed_gamma: Optional[float] = None

    # analyze
    folded_singularities: bool = False
    gamma_bound: bool = False
    singular_canard: bool = False
    maximal_canard: bool = False
    sticking_cycle: bool = False
    closeness: bool = False
    transversality: List[float] = Field(default_factory=list)
    explosion: bool = False
    phi: bool = False

    @field_validator("eps_list")
    @classmethod
    def check_eps_list(cls, v: List[float]) -> List[float]:
        if any(e <= 0 for e in v):
            raise ValueError("all eps values must be positive")
        return v

    @model_validator(mode="after")
    def check_friction(self) -> "RunConfig":
        if self.mu_s <= self.mu_d:
            raise ValueError(f"mu_s ({self.mu_s}) must exceed mu_d ({self.mu_d})")
        if self.gamma_range is not None and self.gamma_range[0] == self.gamma_range[1]:
            raise ValueError("gamma range is empty")
        for grid in (self.gamma_grid, self.sweep_x0):
            if grid is not None and grid[2] < 1:
                raise ValueError("grid needs at least one point")
        return self

    def params(self, gamma: Optional[float] = None) -> Params:
        return Params(gamma=self.gamma if gamma is None else gamma, mu_s=self.mu_s, mu_d=self.mu_d)

    def reg_params(self, eps: Optional[float] = None) -> RegParams:
        return RegParams.create(self.params(), eps=self.eps if eps is None else eps, delta=self.delta)

    @property
    def pool_size(self) -> int:
        return self.workers or (os.cpu_count() or 1)

    def runs_dir(self) -> str:
        return resolve_runs_dir(self.out_dir or settings.runs_dir)


def add_common_flags(parser: argparse.ArgumentParser) -> None:
    """Флаги, общие для всех команд."""
    parser.add_argument("--config", help="JSON-файл конфигурации (флаги важнее)")
    parser.add_argument("--mu-s", dest="mu_s", type=float)
    parser.add_argument("--mu-d", dest="mu_d", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--eps", help="ε или список ε через запятую")
    parser.add_argument("--delta", type=float)
    parser.add_argument("--out", dest="out_dir", help="каталог результатов")
    parser.add_argument("--workers", type=int, help="размер пула (0 = число ядер)")


# флаг → поле RunConfig с разбором
_FLAG_PARSERS = {
    "gamma_range": parse_range,
    "gamma_grid": parse_grid,
    "sweep_x0": parse_grid,
    "transversality": parse_floats,
}


def build_run_config(command: str, args: argparse.Namespace) -> RunConfig:
    """
    Собирает RunConfig из умолчаний, файла --config и флагов.

    Raises:
        ConfigError: если файл конфигурации не читается или флаг не разбирается
        pydantic.ValidationError: при недопустимых значениях
    """
    data: Dict[str, Any] = {"command": command}

    path = getattr(args, "config", None)
    if path:
        from_file = safe_read_json(path)
        if not from_file:
            raise ConfigError(f"config file {path} is missing, empty or invalid", {"path": path})
        data.update({k: v for k, v in from_file.items() if k != "command"})
        log.debug(f"Loaded {len(from_file)} keys from {path}")

    for key, value in vars(args).items():
        if key in ("config", "command", "handler", "log_level") or value is None or value is False:
            continue
        try:
            if key == "eps":
                values = parse_floats(value) if isinstance(value, str) else [float(value)]
                if len(values) == 1:
                    data["eps"] = values[0]
                else:
                    data["eps_list"] = values
            elif key == "policy":
                data["policy"] = BranchPolicy.from_cli(value)
            else:
                parser = _FLAG_PARSERS.get(key)
                data[key] = parser(value) if parser and isinstance(value, str) else value
        except ValueError as e:
            raise ConfigError(f"cannot parse --{key.replace('_', '-')}: {e}", {"flag": key, "value": value}) from e

    return RunConfig(**data)


__all__ = ["RunConfig", "add_common_flags", "build_run_config", "parse_range", "parse_grid", "parse_floats"]
