"""
Глобальный обработчик ошибок команд.
"""
import logging
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from modules_common.errors import EXIT_CONFIG, EXIT_NUMERICAL, StictionError
from typed_dicts import Envelope, ErrorPayload

log = logging.getLogger("stiction-lab.errors")


def error_payload(exc: BaseException) -> Tuple[ErrorPayload, int]:
    """Описание ошибки и код выхода."""
    if isinstance(exc, StictionError):
        return ErrorPayload(**exc.to_payload()), exc.exit_code
    if isinstance(exc, ValidationError):
        problems = [
            {"field": ".".join(str(p) for p in e["loc"]), "message": e["msg"]} for e in exc.errors()
        ]
        return (
            ErrorPayload(
                type="ValidationError",
                message=f"{exc.error_count()} invalid config value(s)",
                module="cli",
                context={"problems": problems},
            ),
            EXIT_CONFIG,
        )
    return (
        ErrorPayload(type=type(exc).__name__, message=str(exc), module="stiction-lab", context={}),
        EXIT_NUMERICAL,
    )


def handle_cli_error(
    exc: BaseException,
    command: str,
    config: Optional[Dict[str, Any]] = None,
    warnings: Optional[List[str]] = None,
) -> Tuple[Envelope, int]:
    """
    Перехватывает исключение команды и собирает конверт с ошибкой.

    Returns:
        (конверт, код выхода)
    """
    payload, code = error_payload(exc)
    # конфигурационные ошибки ожидаемы, полный трейсбек только для остальных
    if code == EXIT_CONFIG:
        log.error(f"{command}: {payload['type']}: {payload['message']}")
    else:
        log.error(f"Command {command} failed: {exc}", exc_info=exc)
    envelope = Envelope(
        command=command,
        config=config or {},
        results=None,
        warnings=list(warnings or []),
        error=payload,
    )
    return envelope, code


__all__ = ["error_payload", "handle_cli_error"]
