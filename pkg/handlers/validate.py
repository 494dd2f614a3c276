# handlers/validate.py - Команда validate: разбор и проверка файла модели

import logging

from handlers.common import EXIT_FAILURE, EXIT_OK, EXIT_VERDICT, CommandError
from services.amalthea_xml import AmaltheaParseError, parse_file

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="проверить файл модели")
    parser.add_argument("file", help="файл модели AMALTHEA (XML)")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    """Нарушения в документе - отрицательный вердикт (1), а не сбой"""
    try:
        model = parse_file(args.file)
    except OSError as e:
        raise CommandError(f"не удалось прочитать {args.file}: {e.strerror or e}", EXIT_FAILURE) from e
    except AmaltheaParseError as e:
        for error in e.errors:
            print(f"{args.file}:{error}")
        print(f"violations: {len(e.errors)}")
        return EXIT_VERDICT

    print(f"violations: 0 ({model.task_count()} tasks, {model.runnable_count()} runnables, "
          f"{model.label_count()} labels)")
    return EXIT_OK
