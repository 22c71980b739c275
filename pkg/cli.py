import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

# Конфиг и Логирование
from config_package.json_utils import dumps_envelope, safe_write_json
from config_package.logging_config import setup_logging
from config_package.settings import get_settings
from modules_common.errors import EXIT_OK, ConfigError, StictionError
from modules_common.paths import run_file
from routers import COMMANDS, build_run_config, handle_cli_error
from typed_dicts import Envelope

log = logging.getLogger("stiction-lab")


def build_parser() -> argparse.ArgumentParser:
    """Парсер со всеми командами."""
    parser = argparse.ArgumentParser(
        prog="stiction-lab",
        description="Осциллятор с трением покоя: траектории, регуляризация, периодические орбиты",
    )
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING, ...")
    sub = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command

    # 1. Настройка логирования (уровень из флага или из настроек)
    level = getattr(logging, args.log_level.upper(), None) if args.log_level else None

    # 2. Валидация конфига
    try:
        current = get_settings()
        setup_logging(level if isinstance(level, int) else current.log_level_value)
        current.validate_on_startup()
    except (ValidationError, ValueError) as e:
        setup_logging(level if isinstance(level, int) else logging.INFO)
        log.critical(f"Configuration error: {e}")
        exc = e if isinstance(e, ValidationError) else ConfigError(str(e), {"source": "settings"})
        envelope, code = handle_cli_error(exc, command)
        print(dumps_envelope(envelope))
        return code

    # 3. Сборка конфигурации команды и запуск
    config_dump = {}
    try:
        cfg = build_run_config(command, args)
        config_dump = cfg.model_dump(mode="json")
        results, warnings = args.handler(cfg)
        envelope = Envelope(command=command, config=config_dump, results=results, warnings=warnings)
        report = run_file(cfg.runs_dir(), command, "report", "json")
        if safe_write_json(report, dict(envelope)):
            log.info(f"{command} finished, report written to {report}")
        else:
            envelope["warnings"] = [*warnings, f"report {report} was not written"]
            log.warning(f"{command} finished, but report {report} was not written")
        code = EXIT_OK
    except (StictionError, ValidationError, ValueError, ArithmeticError) as e:
        envelope, code = handle_cli_error(e, command, config_dump)

    print(dumps_envelope(envelope))
    return code


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        log.info("Interrupted.")
        sys.exit(130)
