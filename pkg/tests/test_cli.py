# -*- coding: utf-8 -*-
"""
Тесты командной строки: сборка конфигурации, коды выхода, отчёты.
"""
import argparse
import json
import os
import sys

import pytest
from pydantic import ValidationError

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

import cli  # noqa: E402
from config_package.constants import BranchPolicy, SimulationMode  # noqa: E402
from config_package.settings import reload_settings  # noqa: E402
from modules_common.errors import (  # noqa: E402
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    ConfigError,
    NewtonDivergenceError,
    NoSingularitiesError,
)
from modules_common.pool import run_sweep  # noqa: E402
from routers.errors import handle_cli_error  # noqa: E402
from routers.run_config import build_run_config, parse_grid, parse_range  # noqa: E402


def _ns(**kwargs):
    """Namespace с пустыми флагами, как после argparse."""
    base = {"config": None, "mu_s": None, "mu_d": None, "gamma": None, "eps": None, "delta": None}
    base.update(kwargs)
    return argparse.Namespace(**base)


def _square(item):
    if item < 0:
        raise ConfigError(f"negative item {item}", {"item": item})
    if item == 0:
        raise ValueError("f(a) and f(b) must have different signs")
    return {"value": item * item}


# ===== Конфигурация =====


def test_defaults_come_from_settings():
    """Без файла и флагов — значения из таблицы моделирования."""
    cfg = build_run_config("simulate", _ns())
    assert (cfg.mu_s, cfg.mu_d, cfg.gamma) == (1.1, 0.4, 2.0)
    assert cfg.eps == pytest.approx(1e-3)
    assert cfg.delta == pytest.approx(0.6)
    assert cfg.mode is SimulationMode.PWS
    assert cfg.policy is BranchPolicy.STICK_FIRST


def test_flags_override_config_file(tmp_path):
    """Флаги важнее JSON-файла, остальные ключи файла сохраняются."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"gamma": 3.0, "mu_s": 1.3, "T": 5.0}), encoding="utf-8")
    cfg = build_run_config("simulate", _ns(config=str(path), gamma=4.0))
    assert cfg.gamma == 4.0
    assert cfg.mu_s == 1.3
    assert cfg.T == 5.0


def test_missing_config_file_is_config_error(tmp_path):
    """Нечитаемый файл конфигурации."""
    with pytest.raises(ConfigError):
        build_run_config("simulate", _ns(config=str(tmp_path / "absent.json")))


def test_eps_list_and_policy_parsing():
    """Список ε через запятую и короткое имя политики."""
    cfg = build_run_config("analyze", _ns(eps="1e-4,3e-4,1e-3", policy="enumerate"))
    assert cfg.eps_list == [1e-4, 3e-4, 1e-3]
    assert cfg.policy is BranchPolicy.ENUMERATE_BOTH
    single = build_run_config("analyze", _ns(eps="2e-3"))
    assert single.eps == pytest.approx(2e-3)
    assert single.eps_list == []


def test_bad_range_is_config_error():
    """Диапазон не в формате a:b."""
    with pytest.raises(ConfigError):
        build_run_config("orbits", _ns(gamma_range="0.3-5"))
    with pytest.raises(ConfigError):
        build_run_config("analyze", _ns(eps="1e-3,abc"))


def test_friction_order_is_validated():
    """μ_s ≤ μ_d отклоняется при сборке."""
    with pytest.raises(ValidationError):
        build_run_config("simulate", _ns(mu_s=0.3, mu_d=0.4))


def test_range_and_grid_parsers():
    assert parse_range("0.3:5") == (0.3, 5.0)
    assert parse_grid("-1:1:11") == (-1.0, 1.0, 11)
    with pytest.raises(ValueError):
        parse_grid("0:1")


# ===== Ошибки =====


def test_error_exit_codes():
    """Ошибки конфигурации → 2, численные сбои → 3."""
    env, code = handle_cli_error(ConfigError("bad flag"), "simulate")
    assert code == EXIT_CONFIG
    assert env["error"]["type"] == "ConfigError"
    assert env["results"] is None

    env, code = handle_cli_error(NewtonDivergenceError("no convergence", {"gamma": 5.0}), "orbits", warnings=["w"])
    assert code == EXIT_NUMERICAL
    assert env["error"]["context"] == {"gamma": 5.0}
    assert env["warnings"] == ["w"]

    try:
        build_run_config("simulate", _ns(mu_s=0.3, mu_d=0.4))
    except ValidationError as e:
        env, code = handle_cli_error(e, "simulate")
    assert code == EXIT_CONFIG
    assert env["error"]["type"] == "ValidationError"


# ===== Пул =====


def test_sweep_keeps_order_and_errors(tmp_path):
    """Результаты в порядке элементов, ошибка одного элемента не роняет прогон."""
    outcomes = run_sweep(_square, [1, -2, 0, 3], workers=1, shard_dir=str(tmp_path))
    assert [o.index for o in outcomes] == [0, 1, 2, 3]
    assert outcomes[0].result == {"value": 1}
    assert not outcomes[1].ok
    assert outcomes[1].error["type"] == "ConfigError"
    assert not outcomes[2].ok
    assert outcomes[2].error["type"] == "ValueError"
    assert outcomes[2].error["context"] == {"index": 2}
    assert outcomes[3].result == {"value": 9}
    assert len(list(tmp_path.glob("shard_*.json"))) == 4


# ===== Команды =====


def test_analyze_writes_report(tmp_path, capsys):
    """analyze --phi --gamma-bound: код 0, отчёт в каталоге результатов."""
    code = cli.main(["analyze", "--phi", "--gamma-bound", "--out", str(tmp_path)])
    assert code == 0
    report = tmp_path / "analyze_report.json"
    assert report.exists()
    data = json.loads(report.read_text(encoding="utf-8"))
    assert data["results"]["gamma_bound"]["gamma_upper_bound"] == pytest.approx(40.8248290, rel=1e-7)
    assert max(abs(v) for v in data["results"]["phi"]["conditions_residual"]) <= 1e-12
    stdout = json.loads(capsys.readouterr().out)
    assert stdout["command"] == "analyze"


def test_analyze_without_flags_warns(tmp_path, capsys):
    """Пустой запуск — не ошибка, но предупреждение в конверте."""
    code = cli.main(["analyze", "--out", str(tmp_path)])
    assert code == 0
    stdout = json.loads(capsys.readouterr().out)
    assert stdout["warnings"]


def test_simulate_pws_writes_csv_and_events(tmp_path, capsys):
    """simulate --mode pws: CSV траектории и журнал событий."""
    code = cli.main(["simulate", "--mode", "pws", "--x0", "0.3", "--T", "6.283185307179586", "--out", str(tmp_path)])
    assert code == 0
    stdout = json.loads(capsys.readouterr().out)
    files = stdout["results"]["files"][0]
    assert os.path.exists(files["csv"])
    assert os.path.exists(files["events"])


def test_simulate_bad_delta_exits_with_config_code(tmp_path, capsys):
    """δ вне (0, 1) — ошибка конфигурации."""
    code = cli.main(["simulate", "--delta", "1.5", "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
    stdout = json.loads(capsys.readouterr().out)
    assert stdout["error"] is not None


def test_numerical_failure_exits_with_numerical_code(tmp_path, capsys, mocker):
    """Численный сбой внутри команды → код 3 и описание ошибки в конверте."""
    mocker.patch(
        "routers.analyze.locate_saddle_node_collision",
        side_effect=NoSingularitiesError("no folded singularities", {"Gamma_delta": 1.2}),
    )
    code = cli.main(["analyze", "--gamma-bound", "--out", str(tmp_path)])
    assert code == EXIT_NUMERICAL
    stdout = json.loads(capsys.readouterr().out)
    assert stdout["error"]["type"] == "NoSingularitiesError"
    assert not (tmp_path / "analyze_report.json").exists()


def test_invalid_environment_exits_with_config_code(tmp_path, capsys, monkeypatch):
    """MU_S ≤ MU_D в окружении: конверт с ошибкой и код 2, а не трейсбек."""
    monkeypatch.setenv("MU_S", "0.3")
    try:
        with pytest.raises(ValidationError):
            reload_settings()
        code = cli.main(["analyze", "--gamma-bound", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        stdout = json.loads(capsys.readouterr().out)
        assert stdout["error"]["type"] == "ValidationError"
        assert stdout["results"] is None
        assert not (tmp_path / "analyze_report.json").exists()
    finally:
        monkeypatch.setenv("MU_S", "1.1")
        reload_settings()


def test_unwritable_report_is_a_warning(tmp_path, capsys, mocker):
    """Отчёт не записался: команда успешна, но в конверте предупреждение."""
    mocker.patch("cli.safe_write_json", return_value=False)
    code = cli.main(["analyze", "--gamma-bound", "--out", str(tmp_path)])
    assert code == 0
    stdout = json.loads(capsys.readouterr().out)
    assert any("was not written" in w for w in stdout["warnings"])
    assert not (tmp_path / "analyze_report.json").exists()


def test_same_config_gives_identical_files(tmp_path, capsys):
    """Одинаковая конфигурация: побайтно одинаковые CSV, журналы событий и отчёт."""
    argv = ["simulate", "--mode", "pws", "--x0", "0.3", "--T", "6.283185307179586"]
    runs = [tmp_path / "a", tmp_path / "b"]
    for out in runs:
        assert cli.main([*argv, "--out", str(out)]) == 0
    capsys.readouterr()

    first, second = runs
    names = sorted(p.name for p in first.iterdir() if p.suffix in (".csv", ".jsonl"))
    assert names
    assert names == sorted(p.name for p in second.iterdir() if p.suffix in (".csv", ".jsonl"))
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()

    report_a = (first / "simulate_report.json").read_text(encoding="utf-8").replace(str(first), "<out>")
    report_b = (second / "simulate_report.json").read_text(encoding="utf-8").replace(str(second), "<out>")
    assert report_a == report_b
