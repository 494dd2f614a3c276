# handlers/evaluate.py - Команда evaluate: симуляция гиперпериода для заданного размещения

import logging

from handlers.common import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERDICT,
    CommandError,
    add_platform_arguments,
    build_platform,
    load_model,
    resolve_active,
)
from model.models import ExecutionBound
from model.system import ModelError
from services.allocation import AllocationError, load_allocation
from services.scheduler import SimulationError, ScheduleSimulator, write_trace_csv
from utils.helpers import format_us

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("evaluate", help="оценить размещение симуляцией гиперпериода")
    parser.add_argument("file", help="файл модели AMALTHEA (XML)")
    parser.add_argument("--alloc", required=True, help="JSON размещения")
    add_platform_arguments(parser)
    parser.add_argument("--trace", default=None, help="записать трассу заданий в CSV")
    parser.add_argument("--bcet", action="store_true", help="использовать BCET вместо WCET")
    parser.add_argument("--non-preemptive", action="store_true", help="невытесняющее планирование")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    width, height, active = resolve_active(args)
    model = load_model(args.file)
    model, platform = build_platform(model, args, width, height, active)

    try:
        allocation = load_allocation(args.alloc, model)
    except OSError as e:
        raise CommandError(f"не удалось прочитать {args.alloc}: {e.strerror or e}", EXIT_FAILURE) from e
    except AllocationError as e:
        raise CommandError(f"{args.alloc}: {e}", EXIT_USAGE) from e

    mode = ExecutionBound.BCET if args.bcet else ExecutionBound.WCET
    try:
        simulator = ScheduleSimulator(model, platform)
        result = simulator.simulate(allocation, mode, preemptive=not args.non_preemptive)
    except AllocationError as e:
        raise CommandError(f"некорректное размещение: {e}", EXIT_USAGE) from e
    except (ModelError, SimulationError) as e:
        raise CommandError(str(e), EXIT_FAILURE) from e

    if args.trace:
        try:
            write_trace_csv(result, args.trace)
        except OSError as e:
            raise CommandError(f"не удалось записать {args.trace}: {e.strerror or e}", EXIT_FAILURE) from e

    print(f"missed_deadlines: {result.missed_deadlines}/{result.total_deadlines}")
    print(f"makespan_us: {format_us(result.makespan_ns)}")
    print(f"hyperperiod_us: {format_us(result.hyperperiod_ns)}")

    if result.missed_deadlines:
        logger.info(f"❌ Пропущено сроков: {result.missed_deadlines}")
        return EXIT_VERDICT
    logger.info("✅ Все сроки соблюдены")
    return EXIT_OK
