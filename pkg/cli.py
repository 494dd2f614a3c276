#!/usr/bin/env python3
# cli.py - Точка входа: генерация, проверка, оценка и оптимизация моделей AMALTHEA
# Подкоманды: democar-emit, validate, inspect, evaluate, optimize

import argparse
import logging
import sys
from typing import List, Optional

import config
from handlers import COMMANDS
from handlers.common import EXIT_USAGE, CommandError, print_error

logger = logging.getLogger(__name__)


def setup_logging(level: str = config.LOG_LEVEL) -> None:
    """Логи в stderr, stdout остаётся для результатов"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amalthea-tool",
        description="Модели AMALTHEA, бенчмарк DemoCar и размещение на сети на кристалле",
    )
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="уровень логирования")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Разбирает аргументы и выполняет подкоманду.

    Returns:
        Код выхода: 0 успех, 1 отрицательный вердикт, 2 ошибка использования,
        3 ошибка ввода-вывода или разбора
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except CommandError as e:
        logger.error(f"Команда {args.command} завершилась с ошибкой: {e}")
        print_error(str(e))
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
