# handlers/common.py - Общие части команд: коды выхода, загрузка модели и платформы

import logging
import sys
from typing import Optional, Tuple

import config
from model.system import AmaltheaModel
from services.amalthea_xml import AmaltheaParseError, parse_file
from services.noc import NocError, NocPlatform, parse_mesh, platform_for_model

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT = 1  # нарушения, пропущенные сроки, нерасписываемое размещение
EXIT_USAGE = 2
EXIT_FAILURE = 3  # ввод-вывод или разбор


class CommandError(Exception):
    """Ошибка команды с готовым кодом выхода"""

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def print_error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def load_model(path: str) -> AmaltheaModel:
    """
    Загружает модель из файла.

    Raises:
        CommandError: Файл не читается или не разбирается (EXIT_FAILURE)
    """
    try:
        return parse_file(path)
    except OSError as e:
        raise CommandError(f"не удалось прочитать {path}: {e.strerror or e}", EXIT_FAILURE) from e
    except AmaltheaParseError as e:
        for error in e.errors:
            print(f"{path}:{error}", file=sys.stderr)
        raise CommandError(f"{path}: ошибок разбора {len(e.errors)}", EXIT_FAILURE) from e


def check_mesh(mesh: str, active: Optional[int] = None) -> Tuple[int, int]:
    """Проверка флагов --mesh/--active до начала работы"""
    try:
        width, height = parse_mesh(mesh)
    except ValueError as e:
        raise CommandError(str(e), EXIT_USAGE) from e
    if active is not None and not 1 <= active <= width * height:
        raise CommandError(f"--active {active} вне диапазона [1, {width * height}]", EXIT_USAGE)
    return width, height


def add_platform_arguments(parser) -> None:
    parser.add_argument("--mesh", default="2x2", help="размер сетки WxH (по умолчанию 2x2)")
    parser.add_argument("--active", type=int, default=None, help="число включённых ядер (по умолчанию флаги из модели)")
    parser.add_argument("--hop-ns", type=int, default=config.NOC_HOP_LATENCY_NS, help="задержка перехода, нс")
    parser.add_argument("--flit-bits", type=int, default=config.NOC_FLIT_BITS, help="размер флита, бит")
    parser.add_argument("--frequency-hz", type=int, default=None, help="заменить частоту всех кварцев")


def resolve_active(args) -> Tuple[int, int, Optional[int]]:
    """Без --active сохраняются флаги ядер из файла модели"""
    width, height = check_mesh(args.mesh, args.active)
    active = args.active
    if args.hop_ns < 1 or args.flit_bits < 1:
        raise CommandError("--hop-ns и --flit-bits должны быть положительными", EXIT_USAGE)
    if args.frequency_hz is not None and args.frequency_hz < 1:
        raise CommandError("--frequency-hz должен быть положительным", EXIT_USAGE)
    return width, height, active


def build_platform(model: AmaltheaModel, args, width: int, height: int, active: Optional[int]) -> Tuple[AmaltheaModel, NocPlatform]:
    try:
        return platform_for_model(
            model, width, height, active,
            hop_latency_ns=args.hop_ns,
            flit_bits=args.flit_bits,
            frequency_hz=args.frequency_hz,
        )
    except (ValueError, NocError) as e:
        raise CommandError(f"платформа {width}x{height}: {e}", EXIT_USAGE) from e
