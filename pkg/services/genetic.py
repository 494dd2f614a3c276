# services/genetic.py - Генетический алгоритм размещения runnable и меток по ядрам
# Лексикографическая приспособленность (пропущенные сроки, makespan), острова с миграцией по кольцу

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

import config
from model.models import ExecutionBound
from model.system import AmaltheaModel
from services.allocation import Allocation
from services.noc import NocPlatform
from services.scheduler import ScheduleSimulator
from utils.helpers import format_us
from workers.evaluation import EvaluationPool

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["generation", "best_missed", "best_makespan_us"]

Genes = Tuple[int, ...]


class GaConfigError(ValueError):
    """Некорректные параметры генетического алгоритма"""


class ChromosomeError(ValueError):
    """Хромосома не соответствует модели или платформе"""


@dataclass(frozen=True, order=True)
class Fitness:
    """Меньше - лучше: сначала пропущенные сроки, затем makespan"""
    missed: int
    makespan_ns: int


@dataclass(frozen=True)
class GaConfig:
    generations: int = config.GA_GENERATIONS
    population: int = config.GA_POPULATION
    islands: int = config.GA_ISLANDS
    island_population: int = config.GA_ISLAND_POPULATION
    migration_interval: int = config.GA_MIGRATION_INTERVAL
    crossover_rate: float = config.GA_CROSSOVER_RATE
    mutation_rate: Optional[float] = config.GA_MUTATION_RATE  # None = 1 / длина хромосомы
    elitism: int = config.GA_ELITISM
    tournament_size: int = config.GA_TOURNAMENT_SIZE
    seed: int = config.GA_SEED
    workers: int = config.EVAL_WORKERS

    @property
    def island_size(self) -> int:
        """Особей на острове: population без островов, island_population с островами"""
        return self.population if self.islands == 1 else self.island_population

    def validate(self) -> None:
        for name in ("generations", "population", "islands", "island_population",
                     "migration_interval", "tournament_size", "workers"):
            if getattr(self, name) < 1:
                raise GaConfigError(f"{name} должен быть положительным: {getattr(self, name)}")
        if self.elitism < 0 or self.elitism > self.island_size:
            raise GaConfigError(f"elitism={self.elitism} вне диапазона [0, {self.island_size}]")
        if self.seed < 0:
            raise GaConfigError(f"seed должен быть неотрицательным: {self.seed}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise GaConfigError(f"crossover_rate вне [0, 1]: {self.crossover_rate}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise GaConfigError(f"mutation_rate вне [0, 1]: {self.mutation_rate}")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best: Fitness
    genes: Genes
    island_best: Tuple[Fitness, ...]


@dataclass
class GaHistory:
    records: List[GenerationRecord] = field(default_factory=list)

    @property
    def best(self) -> GenerationRecord:
        """Лучшая запись за весь прогон (при равенстве - самое раннее поколение)"""
        return min(self.records, key=lambda record: (record.best, record.generation))

    @property
    def best_fitness(self) -> Fitness:
        return self.best.best

    @property
    def best_genes(self) -> Genes:
        return self.best.genes

    def first_schedulable_generation(self) -> Optional[int]:
        """Первое поколение без пропущенных сроков"""
        for record in self.records:
            if record.best.missed == 0:
                return record.generation
        return None


class AllocationProblem:
    """
    Задача размещения: кодирование хромосом и оценка через симулятор.

    Ген i < |runnables| - индекс активного ядра для runnable i (порядок модели),
    остальные гены - для меток.
    """

    def __init__(self, model: AmaltheaModel, platform: NocPlatform):
        self.model = model
        self.platform = platform
        self.simulator = ScheduleSimulator(model, platform)
        self.active_cores = platform.active_cores
        self.runnable_ids = [runnable.id for runnable in model.runnables]
        self.label_ids = [label.id for label in model.labels]

    @property
    def length(self) -> int:
        return len(self.runnable_ids) + len(self.label_ids)

    @property
    def core_count(self) -> int:
        return len(self.active_cores)

    def decode(self, genes: Sequence[int]) -> Allocation:
        if len(genes) != self.length:
            raise ChromosomeError(f"Длина хромосомы {len(genes)} не равна {self.length}")
        cores = self.active_cores
        for gene in genes:
            if not 0 <= gene < len(cores):
                raise ChromosomeError(f"Ген {gene} вне диапазона [0, {len(cores)})")
        split = len(self.runnable_ids)
        return Allocation(
            runnable_core={rid: cores[int(g)].id for rid, g in zip(self.runnable_ids, genes[:split])},
            label_core={lid: cores[int(g)].id for lid, g in zip(self.label_ids, genes[split:])},
        )

    def encode(self, allocation: Allocation) -> np.ndarray:
        index = {core.id: i for i, core in enumerate(self.active_cores)}
        try:
            genes = [index[allocation.runnable_core[rid]] for rid in self.runnable_ids]
            genes += [index[allocation.label_core[lid]] for lid in self.label_ids]
        except KeyError as e:
            raise ChromosomeError(f"Размещение не кодируется на активные ядра: {e}") from e
        return np.array(genes, dtype=np.int64)

    def evaluate(self, genes: Sequence[int]) -> Fitness:
        result = self.simulator.simulate(self.decode(genes), ExecutionBound.WCET)
        return Fitness(missed=result.missed_deadlines, makespan_ns=result.makespan_ns)


def decode(genes: Sequence[int], model: AmaltheaModel, platform: NocPlatform) -> Allocation:
    return AllocationProblem(model, platform).decode(genes)


def encode(allocation: Allocation, model: AmaltheaModel, platform: NocPlatform) -> np.ndarray:
    return AllocationProblem(model, platform).encode(allocation)


def evaluate(genes: Sequence[int], model: AmaltheaModel, platform: NocPlatform) -> Fitness:
    return AllocationProblem(model, platform).evaluate(genes)


class GeneticAllocator:
    """Генетический алгоритм с островами; результат - чистая функция (модель, платформа, конфиг)"""

    def __init__(self, problem: AllocationProblem, ga_config: GaConfig):
        ga_config.validate()
        self.problem = problem
        self.config = ga_config
        self.mutation_rate = (
            ga_config.mutation_rate if ga_config.mutation_rate is not None else 1.0 / problem.length
        )
        self._cache: Dict[Genes, Fitness] = {}

    def run(self, on_generation: Optional[Callable[[GenerationRecord], None]] = None) -> GaHistory:
        cfg = self.config
        size = cfg.island_size
        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.islands)
        rngs = [np.random.default_rng(seed) for seed in seeds]
        populations = [
            rng.integers(0, self.problem.core_count, size=(size, self.problem.length))
            for rng in rngs
        ]
        history = GaHistory()

        logger.info(
            f"ГА: {cfg.generations} поколений, островов {cfg.islands} x {size} особей, "
            f"длина хромосомы {self.problem.length}, активных ядер {self.problem.core_count}"
        )

        with EvaluationPool(self.problem, cfg.workers) as pool:
            for generation in range(1, cfg.generations + 1):
                fitnesses = [self._evaluate(population, pool) for population in populations]
                record = self._record(generation, populations, fitnesses)
                history.records.append(record)
                if on_generation:
                    on_generation(record)

                logger.debug(f"Поколение {generation}: лучшая {record.best}")
                if generation % 10 == 0:
                    logger.info(
                        f"Поколение {generation}: пропущено {record.best.missed}, "
                        f"makespan {record.best.makespan_ns} нс"
                    )

                if generation == cfg.generations:
                    break
                if cfg.islands > 1 and generation % cfg.migration_interval == 0:
                    self._migrate(populations, fitnesses)
                populations = [
                    self._breed(population, fits, rng)
                    for population, fits, rng in zip(populations, fitnesses, rngs)
                ]

        logger.info(f"ГА завершён: лучшая приспособленность {history.best_fitness}")
        return history

    def _evaluate(self, population: np.ndarray, pool) -> List[Fitness]:
        genes_list = [tuple(int(g) for g in row) for row in population]
        missing = [genes for genes in dict.fromkeys(genes_list) if genes not in self._cache]
        if missing:
            for genes, fitness in zip(missing, pool.evaluate_many(missing)):
                self._cache[genes] = fitness
        return [self._cache[genes] for genes in genes_list]

    @staticmethod
    def _best_index(fits: Sequence[Fitness]) -> int:
        return min(range(len(fits)), key=lambda i: (fits[i], i))

    def _record(self, generation: int, populations, fitnesses) -> GenerationRecord:
        island_best = []
        best = None
        for population, fits in zip(populations, fitnesses):
            index = self._best_index(fits)
            island_best.append(fits[index])
            if best is None or fits[index] < best[0]:
                best = (fits[index], tuple(int(g) for g in population[index]))
        return GenerationRecord(
            generation=generation,
            best=best[0],
            genes=best[1],
            island_best=tuple(island_best),
        )

    def _migrate(self, populations: List[np.ndarray], fitnesses: List[List[Fitness]]) -> None:
        """Лучшая особь острова i заменяет худшую на острове i+1 (кольцо), если она лучше"""
        migrants = []
        for population, fits in zip(populations, fitnesses):
            index = self._best_index(fits)
            migrants.append((population[index].copy(), fits[index]))

        count = len(populations)
        for source, (genes, fitness) in enumerate(migrants):
            target = (source + 1) % count
            fits = fitnesses[target]
            worst = max(range(len(fits)), key=lambda i: (fits[i], i))
            if fitness < fits[worst]:
                populations[target][worst] = genes
                fits[worst] = fitness
        logger.debug(f"Миграция по кольцу между {count} островами")

    def _tournament(self, fits: Sequence[Fitness], rng: np.random.Generator) -> int:
        contenders = rng.integers(0, len(fits), size=self.config.tournament_size)
        return min((int(i) for i in contenders), key=lambda i: (fits[i], i))

    def _breed(self, population: np.ndarray, fits: Sequence[Fitness], rng: np.random.Generator) -> np.ndarray:
        size, length = population.shape
        ranked = sorted(range(size), key=lambda i: (fits[i], i))
        children = [population[i].copy() for i in ranked[:self.config.elitism]]

        while len(children) < size:
            first = population[self._tournament(fits, rng)]
            second = population[self._tournament(fits, rng)]
            child_a, child_b = first.copy(), second.copy()
            if length > 1 and rng.random() < self.config.crossover_rate:
                point = int(rng.integers(1, length))
                child_a[point:] = second[point:]
                child_b[point:] = first[point:]
            for child in (child_a, child_b):
                mask = rng.random(length) < self.mutation_rate
                if mask.any():
                    child[mask] = rng.integers(0, self.problem.core_count, size=int(mask.sum()))
                if len(children) < size:
                    children.append(child)

        return np.array(children, dtype=population.dtype)


def run(model: AmaltheaModel, platform: NocPlatform, ga_config: GaConfig) -> GaHistory:
    """Запуск ГА для модели и платформы"""
    return GeneticAllocator(AllocationProblem(model, platform), ga_config).run()


def write_history_csv(history: GaHistory, path: Union[str, Path]) -> None:
    """CSV по поколениям: generation,best_missed,best_makespan_us"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(HISTORY_COLUMNS)
        for record in history.records:
            writer.writerow([record.generation, record.best.missed, format_us(record.best.makespan_ns)])
    logger.info(f"История ГА записана в {path}: {len(history.records)} поколений")
