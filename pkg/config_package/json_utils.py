"""
JSON-ввод/вывод отчётов и журналов.

Отчёты команд, шарды воркеров и журналы событий содержат numpy-значения,
Enum-метки и комплексные мультипликаторы; все они проходят через _json_default.
Запись атомарная: сначала временный файл рядом, затем os.replace.
"""

import json
import logging
import os
import tempfile
from enum import Enum
from typing import Any, Iterable

import numpy as np

log = logging.getLogger("stiction-lab.json_utils")


def _json_default(obj: Any) -> Any:
    """Сериализация numpy-скаляров, массивов, Enum и complex."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def _atomic_write(path: str, chunks: Iterable[str]) -> int:
    """Пишет строки во временный файл и подменяет им path. Возвращает число строк."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp_", suffix=".json", dir=parent)
    count = 0
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            for chunk in chunks:
                f.write(chunk)
                count += 1
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return count


def safe_read_json(path: str) -> dict:
    """
    Чтение JSON-объекта (файл конфигурации запуска, шард воркера).

    Args:
        path: Путь к файлу

    Returns:
        Словарь; {} если файла нет, он битый или в нём не объект
    """
    if not os.path.exists(path):
        log.debug(f"JSON file {path} not found")
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        log.warning(f"Broken JSON in {path}: {e}")
        return {}
    except OSError as e:
        log.warning(f"Cannot read {path}: {e}")
        return {}
    if not isinstance(data, dict):
        log.warning(f"{path} holds {type(data).__name__}, expected object")
        return {}
    return data


def safe_write_json(path: str, payload: dict) -> bool:
    """
    Атомарная запись отчёта или шарда.

    Returns:
        False при ошибке сериализации или записи (ошибка логируется)
    """
    try:
        text = json.dumps(payload, ensure_ascii=False, indent=2, default=_json_default)
        _atomic_write(path, [text])
    except (TypeError, ValueError) as e:
        log.error(f"Report for {path} is not serializable: {e}")
        return False
    except OSError as e:
        log.error(f"Cannot write report {path}: {e}")
        return False
    log.debug(f"Report written: {path}")
    return True


def write_json_lines(path: str, rows: Iterable[dict]) -> bool:
    """Журнал событий: одна запись на строку."""
    try:
        count = _atomic_write(
            path,
            (json.dumps(row, ensure_ascii=False, default=_json_default) + "\n" for row in rows),
        )
    except (TypeError, ValueError) as e:
        log.error(f"Event log {path} is not serializable: {e}")
        return False
    except OSError as e:
        log.error(f"Cannot write event log {path}: {e}")
        return False
    log.debug(f"Event log written: {path} ({count} rows)")
    return True


def dumps_envelope(payload: dict) -> str:
    """Конверт команды для stdout."""
    return json.dumps(payload, ensure_ascii=False, indent=2, default=_json_default)
