# handlers/optimize.py - Команда optimize: поиск размещения генетическим алгоритмом

import logging

import config
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
from model.system import ModelError
from services.allocation import save_allocation
from services.genetic import (
    AllocationProblem,
    GaConfig,
    GaConfigError,
    GeneticAllocator,
    write_history_csv,
)
from services.scheduler import SimulationError
from utils.helpers import format_us

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("optimize", help="найти размещение генетическим алгоритмом")
    parser.add_argument("file", help="файл модели AMALTHEA (XML)")
    add_platform_arguments(parser)
    parser.add_argument("--generations", type=int, default=config.GA_GENERATIONS)
    parser.add_argument("--pop", type=int, default=config.GA_POPULATION, help="размер популяции без островов")
    parser.add_argument("--islands", type=int, default=config.GA_ISLANDS)
    parser.add_argument("--island-pop", type=int, default=config.GA_ISLAND_POPULATION)
    parser.add_argument("--migrate", type=int, default=config.GA_MIGRATION_INTERVAL, help="интервал миграции, поколений")
    parser.add_argument("--seed", type=int, default=config.GA_SEED)
    parser.add_argument("--crossover-rate", type=float, default=config.GA_CROSSOVER_RATE)
    parser.add_argument("--mutation-rate", type=float, default=config.GA_MUTATION_RATE, help="по умолчанию 1/длина")
    parser.add_argument("--elitism", type=int, default=config.GA_ELITISM)
    parser.add_argument("--tournament-size", type=int, default=config.GA_TOURNAMENT_SIZE)
    parser.add_argument("--workers", type=int, default=config.EVAL_WORKERS, help="процессов для оценки")
    parser.add_argument("--csv", required=True, help="CSV истории по поколениям")
    parser.add_argument("--best-alloc", default=None, help="JSON лучшего размещения")
    parser.set_defaults(handler=handle)


def ga_config_from_args(args) -> GaConfig:
    ga_config = GaConfig(
        generations=args.generations,
        population=args.pop,
        islands=args.islands,
        island_population=args.island_pop,
        migration_interval=args.migrate,
        crossover_rate=args.crossover_rate,
        mutation_rate=args.mutation_rate,
        elitism=args.elitism,
        tournament_size=args.tournament_size,
        seed=args.seed,
        workers=args.workers,
    )
    try:
        ga_config.validate()
    except GaConfigError as e:
        raise CommandError(str(e), EXIT_USAGE) from e
    return ga_config


def handle(args) -> int:
    ga_config = ga_config_from_args(args)
    width, height, active = resolve_active(args)
    model = load_model(args.file)
    model, platform = build_platform(model, args, width, height, active)

    try:
        problem = AllocationProblem(model, platform)
        history = GeneticAllocator(problem, ga_config).run()
    except (ModelError, SimulationError) as e:
        raise CommandError(str(e), EXIT_FAILURE) from e

    best = history.best
    try:
        write_history_csv(history, args.csv)
        if args.best_alloc:
            save_allocation(problem.decode(best.genes), model, args.best_alloc)
    except OSError as e:
        raise CommandError(f"не удалось записать результат: {e.strerror or e}", EXIT_FAILURE) from e

    found = history.first_schedulable_generation()
    print(f"best_missed: {best.best.missed}")
    print(f"best_makespan_us: {format_us(best.best.makespan_ns)}")
    print(f"schedulable_generation: {found if found is not None else 'none'}")

    return EXIT_OK if best.best.missed == 0 else EXIT_VERDICT
