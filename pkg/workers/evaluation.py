# workers/evaluation.py - Пул процессов для параллельной оценки хромосом
# При workers == 1 оценка идёт в текущем процессе

import logging
import multiprocessing
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

if TYPE_CHECKING:
    from services.genetic import AllocationProblem, Fitness

logger = logging.getLogger(__name__)

# Задача в дочернем процессе, передаётся инициализатором пула
_worker_problem: Optional["AllocationProblem"] = None


def _init_worker(problem: "AllocationProblem") -> None:
    global _worker_problem
    _worker_problem = problem


def _evaluate_in_worker(genes: Tuple[int, ...]) -> "Fitness":
    return _worker_problem.evaluate(genes)


class EvaluationPool:
    """
    Оценка хромосом с сохранением порядка входа.

    Результат не зависит от числа процессов: pool.map возвращает
    значения в порядке аргументов.
    """

    def __init__(self, problem: "AllocationProblem", workers: int = 1):
        if workers < 1:
            raise ValueError(f"Число процессов должно быть положительным: {workers}")
        self.problem = problem
        self.workers = workers
        self._pool = None

    def start(self) -> None:
        if self.workers > 1 and self._pool is None:
            self._pool = multiprocessing.Pool(
                processes=self.workers,
                initializer=_init_worker,
                initargs=(self.problem,),
            )
            logger.info(f"Пул оценки запущен ({self.workers} процессов)")

    def stop(self) -> None:
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None
            logger.info("Пул оценки остановлен")

    def evaluate_many(self, genes_list: Sequence[Tuple[int, ...]]) -> List["Fitness"]:
        if self._pool is None:
            return [self.problem.evaluate(genes) for genes in genes_list]
        return self._pool.map(_evaluate_in_worker, list(genes_list))

    def __enter__(self) -> "EvaluationPool":
        self.start()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is not None and self._pool is not None:
            self._pool.terminate()
        self.stop()
