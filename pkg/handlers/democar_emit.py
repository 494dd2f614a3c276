# handlers/democar_emit.py - Команда democar-emit: запись модели DemoCar в файл

import logging

import config
from handlers.common import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, CommandError
from services.amalthea_xml import write_file
from services.democar import build_democar

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("democar-emit", help="записать модель DemoCar в XML")
    parser.add_argument("--out", required=True, help="путь к выходному файлу")
    parser.add_argument(
        "--injection-period-us",
        type=int,
        default=config.CYLNUM_INJECTION_PERIOD_US,
        help="период событий коленвала для CylNumTriggeredTask, мкс (0 - без событий)",
    )
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    if args.injection_period_us < 0:
        raise CommandError("--injection-period-us не может быть отрицательным", EXIT_USAGE)
    model = build_democar(injection_period_us=args.injection_period_us or None)
    try:
        write_file(model, args.out)
    except OSError as e:
        raise CommandError(f"не удалось записать {args.out}: {e.strerror or e}", EXIT_FAILURE) from e
    print(f"written: {args.out}")
    return EXIT_OK
