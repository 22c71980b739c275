"""
Конфигурационный файл pytest с фикстурами и настройками."""
import os
import sys

# Set environment variables BEFORE importing application modules
os.environ["MU_S"] = "1.1"
os.environ["MU_D"] = "0.4"
os.environ["GAMMA"] = "2.0"
os.environ["LOG_LEVEL"] = "WARNING"

import pytest

# Добавляем родительскую директорию в путь
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from modules_model.params import Params  # noqa: E402
from modules_regularization.phi import RegParams  # noqa: E402


@pytest.fixture
def table_params():
    """Параметры из таблицы моделирования: γ = 2, μ_s = 1.1, μ_d = 0.4."""
    return Params(gamma=2.0, mu_s=1.1, mu_d=0.4)


@pytest.fixture
def reg_params(table_params):
    """Регуляризация с ε = 1e-3, δ = 0.6."""
    return RegParams.create(table_params, eps=1e-3, delta=0.6)


def pytest_configure(config):
    """Настройка pytest маркеров."""
    config.addinivalue_line("markers", "slow: mark test as slow")
    config.addinivalue_line("markers", "integration: mark test as integration")
    config.addinivalue_line("markers", "unit: mark test as unit")
