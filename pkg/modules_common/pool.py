# modules_common/pool.py
"""
Пул воркеров для параметрических прогонов.

Каждый элемент прогона считается в отдельном процессе, результат пишется
в собственный шард-файл; итоговое слияние упорядочено по индексу элемента,
поэтому результат не зависит от порядка завершения воркеров.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

from config_package.json_utils import safe_read_json, safe_write_json
from modules_common.errors import StictionError

log = logging.getLogger("stiction-lab.pool")


@dataclass(frozen=True)
class SweepOutcome:
    """Результат одного элемента прогона."""

    index: int
    item: Any
    result: Optional[Dict[str, Any]]
    error: Optional[Dict[str, Any]]

    @property
    def ok(self) -> bool:
        return self.error is None


def _shard_path(shard_dir: Optional[str], index: int) -> Optional[str]:
    if not shard_dir:
        return None
    return os.path.join(shard_dir, f"shard_{index:05d}.json")


def _run_item(
    func: Callable[[Any], Dict[str, Any]], index: int, item: Any, shard_path: Optional[str]
) -> Dict[str, Any]:
    """Выполняет один элемент и пишет шард."""
    try:
        payload = {"index": index, "result": func(item), "error": None}
    except StictionError as e:
        payload = {"index": index, "result": None, "error": e.to_payload()}
    except (ValueError, ArithmeticError) as e:
        # сбой scipy/numpy: ошибка элемента, а не прогона
        log.warning(f"Sweep item {index} raised {type(e).__name__}: {e}")
        payload = {
            "index": index,
            "result": None,
            "error": {
                "type": type(e).__name__,
                "message": str(e),
                "module": getattr(func, "__module__", "stiction-lab"),
                "context": {"index": index},
            },
        }
    if shard_path is not None:
        safe_write_json(shard_path, payload)
    return payload


def run_sweep(
    func: Callable[[Any], Dict[str, Any]],
    items: Sequence[Any],
    workers: int = 1,
    shard_dir: Optional[str] = None,
) -> List[SweepOutcome]:
    """
    Запускает func по всем items.

    Args:
        func: Функция верхнего уровня модуля (должна сериализоваться pickle),
            возвращающая JSON-совместимый словарь
        items: Параметры прогона
        workers: Размер пула (1 — выполнение в текущем процессе)
        shard_dir: Каталог для шард-файлов (None — без файлов)

    Returns:
        Список SweepOutcome в порядке items
    """
    n = len(items)
    payloads: Dict[int, Dict[str, Any]] = {}

    def _collect(index: int, ret: Dict[str, Any]) -> None:
        # слияние идёт по шард-файлам, если они есть
        path = _shard_path(shard_dir, index)
        payloads[index] = (safe_read_json(path) if path else {}) or ret

    if workers <= 1 or n <= 1:
        for i, item in enumerate(items):
            _collect(i, _run_item(func, i, item, _shard_path(shard_dir, i)))
    else:
        log.info(f"Sweep over {n} items with {workers} workers")
        with ProcessPoolExecutor(max_workers=min(workers, n)) as pool:
            futures = {
                pool.submit(_run_item, func, i, item, _shard_path(shard_dir, i)): i
                for i, item in enumerate(items)
            }
            for fut in as_completed(futures):
                i = futures[fut]
                _collect(i, fut.result())

    outcomes: List[SweepOutcome] = []
    for i, item in enumerate(items):
        p = payloads.get(i) or {}
        if not p:
            log.warning(f"Shard {i} is missing or unreadable")
            p = {"result": None, "error": {"type": "MissingShard", "message": f"shard {i}"}}
        outcomes.append(SweepOutcome(index=i, item=item, result=p.get("result"), error=p.get("error")))
        if p.get("error"):
            log.warning(f"Sweep item {i} failed: {p['error'].get('message')}")
    return outcomes


__all__ = ["SweepOutcome", "run_sweep"]
