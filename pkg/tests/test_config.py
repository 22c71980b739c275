# -*- coding: utf-8 -*-
"""
Тесты конфигурации: настройки, константы, JSON-утилиты.
"""
import json
import logging
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from config_package import (  # noqa: E402
    BranchPolicy,
    EventKind,
    FieldBranch,
    RegionLabel,
    Settings,
    TangencyLabel,
    dumps_envelope,
    get_settings,
    reload_settings,
    safe_read_json,
    safe_write_json,
    settings,
    write_json_lines,
)


# ===== Настройки =====


def test_settings_defaults():
    """Значения по умолчанию из таблицы моделирования."""
    assert settings.mu_s == 1.1
    assert settings.mu_d == 0.4
    assert settings.gamma == 2.0
    assert settings.eps == pytest.approx(1e-3)
    assert settings.delta == pytest.approx(0.6)
    assert settings.classify_tol == pytest.approx(1e-10)
    assert settings.float_format == "%.17g"
    assert get_settings() is get_settings()


def test_validate_on_startup_passes():
    """Согласованные настройки проходят проверку."""
    settings.validate_on_startup()


def test_validate_on_startup_rejects_tolerance_order():
    """Допуск событий не может быть грубее допуска классификации."""
    s = Settings(EVENT_TOL=1e-8, CLASSIFY_TOL=1e-10)
    with pytest.raises(ValueError):
        s.validate_on_startup()


def test_friction_order_rejected():
    """MU_S ≤ MU_D — ошибка валидации."""
    with pytest.raises(ValueError):
        Settings(MU_S=0.3, MU_D=0.4)


def test_log_level_normalized():
    s = Settings(LOG_LEVEL="debug")
    assert s.log_level == "DEBUG"
    assert s.log_level_value == logging.DEBUG
    with pytest.raises(ValueError):
        Settings(LOG_LEVEL="chatty")


def test_reload_settings_reads_environment(monkeypatch):
    """reload_settings подхватывает новое окружение."""
    monkeypatch.setenv("GAMMA", "5.0")
    try:
        assert reload_settings().gamma == 5.0
    finally:
        monkeypatch.setenv("GAMMA", "2.0")
        reload_settings()


# ===== Константы =====


def test_enum_titles():
    """Человеческие названия меток."""
    assert RegionLabel.SIGMA_S.title == "Область залипания"
    assert TangencyLabel.VISIBLE.title == "Видимое касание"
    assert EventKind.STICK_TO_SLIP_ONSET.title == "Срыв в скольжение"
    assert not RegionLabel.G_PLUS.on_switching_manifold
    assert RegionLabel.SIGMA_S.on_switching_manifold


def test_branch_policy_from_cli():
    assert BranchPolicy.from_cli("stick") is BranchPolicy.STICK_FIRST
    assert BranchPolicy.from_cli(" Slip ") is BranchPolicy.SLIP_FIRST
    assert BranchPolicy.from_cli("enumerate_both") is BranchPolicy.ENUMERATE_BOTH
    with pytest.raises(ValueError):
        BranchPolicy.from_cli("both")


def test_field_branch_sigma():
    assert FieldBranch.MINUS.sigma == -1
    assert FieldBranch.STICK.sigma == 0
    assert FieldBranch.from_sigma(1) is FieldBranch.PLUS


# ===== JSON =====


def test_json_roundtrip_with_numpy(tmp_path):
    """numpy-значения и Enum сериализуются."""
    path = str(tmp_path / "sub" / "report.json")
    assert safe_write_json(path, {"x": np.float64(0.5), "v": np.arange(3), "kind": EventKind.SINGULAR_HIT})
    assert safe_read_json(path) == {"x": 0.5, "v": [0, 1, 2], "kind": "singular_hit"}


def test_safe_read_json_tolerates_broken_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert safe_read_json(str(path)) == {}
    assert safe_read_json(str(tmp_path / "absent.json")) == {}


def test_json_lines_and_envelope(tmp_path):
    path = str(tmp_path / "events.jsonl")
    assert write_json_lines(path, [{"t": 0.0}, {"t": np.float64(1.5)}])
    with open(path, encoding="utf-8") as f:
        rows = [json.loads(line) for line in f]
    assert rows == [{"t": 0.0}, {"t": 1.5}]
    assert json.loads(dumps_envelope({"m": complex(1, 2)})) == {"m": [1.0, 2.0]}
