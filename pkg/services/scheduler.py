# services/scheduler.py - Событийная симуляция одного гиперпериода на платформе NoC
# Вытесняющее планирование с фиксированными приоритетами на каждом ядре,
# задержки обмена метками по XY-маршрутам, подсчёт пропущенных сроков

import csv
import heapq
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx

import config
from model.models import (
    Core,
    ExecutionBound,
    InterProcessStimulus,
    PatternStimulus,
    PeriodicStimulus,
    Runnable,
    SingleStimulus,
    SporadicStimulus,
    Task,
)
from model.system import NS_PER_US, AmaltheaModel
from services.allocation import Allocation, check_allocation
from services.noc import NocPlatform

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["task", "runnable", "core", "release_ns", "start_ns", "finish_ns", "deadline_ns", "missed"]


class SimulationError(Exception):
    """Лавина активаций или неразрешимые зависимости заданий"""


@dataclass(frozen=True)
class TaskJob:
    """Активация задачи: раскрывается в задания runnable в порядке задачи"""
    task: Task
    release_ns: int
    deadline_ns: Optional[int]
    runnables: Tuple[Runnable, ...]


@dataclass(frozen=True)
class JobRecord:
    runnable: Runnable
    task: Task
    release_ns: int
    start_ns: int
    finish_ns: int
    absolute_deadline_ns: Optional[int]
    core: Core
    missed: bool


@dataclass(frozen=True)
class SimResult:
    jobs: Tuple[JobRecord, ...]
    makespan_ns: int
    missed_deadlines: int
    total_deadlines: int
    hyperperiod_ns: int


def generate_jobs(model: AmaltheaModel, horizon_ns: int) -> List[TaskJob]:
    """
    Активации задач по времени на интервале [0, horizon_ns).

    Периодические задачи получают срок release + период. Спорадические
    активируются с минимальным интервалом, одиночные и шаблонные - в заданные
    моменты, все без сроков. Задачи InterProcess создаются во время симуляции.

    Args:
        model: Модель
        horizon_ns: Горизонт, не меньше гиперпериода

    Returns:
        Активации, упорядоченные по (момент, убывание приоритета, имя задачи)
    """
    if model.periodic_tasks() and horizon_ns < model.hyperperiod_ns():
        raise ValueError(f"Горизонт {horizon_ns} нс меньше гиперпериода {model.hyperperiod_ns()} нс")

    releases: List[TaskJob] = []
    for task in model.tasks:
        stimulus = model.stimulus_of_task(task)
        runnables = tuple(model.task_runnables(task))

        if isinstance(stimulus, PeriodicStimulus):
            period = stimulus.period_us * NS_PER_US
            t = stimulus.offset_us * NS_PER_US
            while t < horizon_ns:
                releases.append(TaskJob(task, t, t + period, runnables))
                t += period
        elif isinstance(stimulus, SporadicStimulus):
            step = stimulus.min_inter_arrival_us * NS_PER_US
            for t in range(0, horizon_ns, step):
                releases.append(TaskJob(task, t, None, runnables))
        elif isinstance(stimulus, SingleStimulus):
            t = stimulus.time_us * NS_PER_US
            if t < horizon_ns:
                releases.append(TaskJob(task, t, None, runnables))
        elif isinstance(stimulus, PatternStimulus):
            for time_us in stimulus.times_us:
                t = time_us * NS_PER_US
                if t < horizon_ns:
                    releases.append(TaskJob(task, t, None, runnables))

    releases.sort(key=lambda job: (job.release_ns, -job.task.priority, job.task.name))
    return releases


def count_deadlines(result: SimResult) -> Tuple[int, int]:
    """(пропущено, всего) по заданиям со сроком"""
    total = sum(1 for job in result.jobs if job.absolute_deadline_ns is not None)
    missed = sum(1 for job in result.jobs if job.missed)
    return missed, total


class SameInstantOrder:
    """
    Порядок «писатель раньше читателя» для задач, активированных в один момент.

    Рёбра писатель → читатель добавляются по убыванию приоритета писателя;
    ребро, замыкающее цикл, отбрасывается.
    """

    def __init__(self, model: AmaltheaModel):
        self._writes: Dict[str, FrozenSet[str]] = {}
        self._reads: Dict[str, FrozenSet[str]] = {}
        for task in model.tasks:
            runnables = model.task_runnables(task)
            self._writes[task.id] = frozenset(l for r in runnables for l in r.writes)
            self._reads[task.id] = frozenset(l for r in runnables for l in r.reads)
        self._cache: Dict[Tuple[str, ...], List[Tuple[str, str, FrozenSet[str]]]] = {}

    def edges(self, tasks: Sequence[Task]) -> List[Tuple[str, str, FrozenSet[str]]]:
        unique = {task.id: task for task in tasks}
        key = tuple(sorted(unique))
        cached = self._cache.get(key)
        if cached is not None:
            return cached

        candidates = []
        for writer in unique.values():
            for reader in unique.values():
                if writer.id == reader.id:
                    continue
                shared = self._writes[writer.id] & self._reads[reader.id]
                if shared:
                    candidates.append((writer, reader, shared))
        candidates.sort(key=lambda c: (-c[0].priority, -c[1].priority, c[0].name, c[1].name))

        graph = nx.DiGraph()
        graph.add_nodes_from(unique)
        kept = []
        for writer, reader, shared in candidates:
            if nx.has_path(graph, reader.id, writer.id):
                logger.debug(f"Цикл зависимостей: ребро {writer.name} → {reader.name} отброшено")
                continue
            graph.add_edge(writer.id, reader.id)
            kept.append((writer.id, reader.id, shared))

        self._cache[key] = kept
        return kept


class _Job:
    """Задание runnable во время симуляции"""
    __slots__ = (
        "seq", "task", "runnable", "position", "release_ns", "deadline_ns", "core_id",
        "remaining", "start_ns", "finish_ns", "finish_at", "waiting", "dependents", "key",
    )

    def __init__(self, seq, task, runnable, position, release_ns, deadline_ns, core_id, cost):
        self.seq = seq
        self.task = task
        self.runnable = runnable
        self.position = position
        self.release_ns = release_ns
        self.deadline_ns = deadline_ns
        self.core_id = core_id
        self.remaining = cost
        self.start_ns = None
        self.finish_ns = None
        self.finish_at = None
        self.waiting = 0
        self.dependents = []
        # Больший приоритет, раньше активация, имя задачи, позиция в задаче
        self.key = (-task.priority, release_ns, task.name, position, seq)


class ScheduleSimulator:
    """
    Симулятор одного гиперпериода для фиксированных модели и платформы.

    Экземпляр можно переиспользовать для множества размещений (оценка в ГА).
    """

    def __init__(self, model: AmaltheaModel, platform: NocPlatform, max_jobs: int = config.SIM_MAX_JOBS):
        self.model = model
        self.platform = platform
        self.max_jobs = max_jobs
        self.hyperperiod_ns = model.hyperperiod_ns()
        self.base_releases = generate_jobs(model, self.hyperperiod_ns)
        self.order = SameInstantOrder(model)

        self._cores: Dict[str, Core] = {core.id: core for core in platform.cores}
        self._active = [core for core in platform.cores if core.active]
        self._label_bits = {label.id: label.bit_length for label in model.labels}
        self._exec_cache: Dict[Tuple[str, str, ExecutionBound], int] = {}

        # Внешние события для задач InterProcess с периодом инжекции
        self.injections: List[TaskJob] = []
        for task in model.tasks:
            stimulus = model.stimulus_of_task(task)
            if isinstance(stimulus, InterProcessStimulus) and stimulus.injection_period_us:
                step = stimulus.injection_period_us * NS_PER_US
                runnables = tuple(model.task_runnables(task))
                for t in range(0, self.hyperperiod_ns, step):
                    self.injections.append(TaskJob(task, t, None, runnables))

    def _exec_ns(self, runnable: Runnable, core: Core, mode: ExecutionBound) -> int:
        key = (runnable.id, core.id, mode)
        value = self._exec_cache.get(key)
        if value is None:
            value = self.model.execution_time(runnable, core, mode)
            self._exec_cache[key] = value
        return value

    def runnable_cost(self, runnable: Runnable, allocation: Allocation, mode: ExecutionBound) -> int:
        """
        Стоимость задания runnable на его ядре, нс.

        Удалённые чтения меток до вычисления, удалённые записи после,
        без перекрытия обмена и вычисления.
        """
        core = self._cores[allocation.runnable_core[runnable.id]]
        cost = self._exec_ns(runnable, core, mode)
        for label_id in runnable.reads:
            label_core = self._cores[allocation.label_core[label_id]]
            cost += self.platform.message_latency(self._label_bits[label_id], label_core.position, core.position)
        for label_id in runnable.writes:
            label_core = self._cores[allocation.label_core[label_id]]
            cost += self.platform.message_latency(self._label_bits[label_id], core.position, label_core.position)
        return cost

    def simulate(
        self,
        allocation: Allocation,
        mode: ExecutionBound = ExecutionBound.WCET,
        preemptive: bool = True,
    ) -> SimResult:
        """
        Симулирует гиперпериод, пока не завершатся все задания, активированные в [0, H).

        Args:
            allocation: Полное размещение на активные ядра
            mode: WCET для вердикта о планируемости, BCET для оценки снизу
            preemptive: Вытесняющее планирование (по умолчанию) или нет

        Returns:
            SimResult с записями заданий, makespan и числом пропущенных сроков

        Raises:
            AllocationError: Размещение неполное или использует неактивное ядро
            SimulationError: Лавина активаций или взаимная блокировка
        """
        check_allocation(allocation, self.model, self.platform)
        run = _Run(self, allocation, mode, preemptive)
        return run.execute()


class _Run:
    """Состояние одного прогона симуляции"""

    def __init__(self, simulator: ScheduleSimulator, allocation: Allocation, mode: ExecutionBound, preemptive: bool):
        self.sim = simulator
        self.allocation = allocation
        self.preemptive = preemptive
        self.costs = {
            runnable.id: simulator.runnable_cost(runnable, allocation, mode)
            for runnable in simulator.model.runnables
        }
        self.jobs: List[_Job] = []
        self.pending: List[Tuple[int, int, TaskJob]] = []
        self.ready: Dict[str, list] = {core.id: [] for core in simulator._active}
        self.running: Dict[str, Optional[_Job]] = {core.id: None for core in simulator._active}
        self.release_seq = 0

    def _push_release(self, task_job: TaskJob) -> None:
        heapq.heappush(self.pending, (task_job.release_ns, self.release_seq, task_job))
        self.release_seq += 1

    def execute(self) -> SimResult:
        for task_job in self.sim.base_releases:
            self._push_release(task_job)
        for task_job in self.sim.injections:
            self._push_release(task_job)

        while True:
            now = self.pending[0][0] if self.pending else None
            for job in self.running.values():
                if job is not None and (now is None or job.finish_at < now):
                    now = job.finish_at
            if now is None:
                break

            for core in self.sim._active:
                job = self.running[core.id]
                if job is not None and job.finish_at == now:
                    self.running[core.id] = None
                    self._complete(job, now)

            batch = []
            while self.pending and self.pending[0][0] == now:
                batch.append(heapq.heappop(self.pending)[2])
            if batch:
                self._release(batch, now)

            for core in self.sim._active:
                self._dispatch(core.id, now)

        unfinished = [job for job in self.jobs if job.finish_ns is None]
        if unfinished:
            raise SimulationError(f"{len(unfinished)} заданий не завершены: неразрешимые зависимости")
        return self._result()

    def _release(self, batch: List[TaskJob], now: int) -> None:
        created = []
        for task_job in batch:
            chain = []
            for position, runnable in enumerate(task_job.runnables):
                if len(self.jobs) >= self.sim.max_jobs:
                    raise SimulationError(
                        f"activation storm: превышен потолок {self.sim.max_jobs} заданий за гиперпериод"
                    )
                job = _Job(
                    seq=len(self.jobs),
                    task=task_job.task,
                    runnable=runnable,
                    position=position,
                    release_ns=task_job.release_ns,
                    deadline_ns=task_job.deadline_ns,
                    core_id=self.allocation.runnable_core[runnable.id],
                    cost=self.costs[runnable.id],
                )
                if chain:
                    _link(chain[-1], job)
                chain.append(job)
                self.jobs.append(job)
            created.append((task_job.task, chain))

        if len(created) > 1:
            for writer_id, reader_id, labels in self.sim.order.edges([task for task, _ in created]):
                for writer_task, writer_jobs in created:
                    if writer_task.id != writer_id:
                        continue
                    for reader_task, reader_jobs in created:
                        if reader_task.id != reader_id:
                            continue
                        for reader in reader_jobs:
                            needed = labels.intersection(reader.runnable.reads)
                            if not needed:
                                continue
                            for writer in writer_jobs:
                                if not needed.isdisjoint(writer.runnable.writes):
                                    _link(writer, reader)

        for _, chain in created:
            for job in chain:
                if job.waiting == 0:
                    heapq.heappush(self.ready[job.core_id], (job.key, job))

    def _complete(self, job: _Job, now: int) -> None:
        job.finish_ns = now
        for dependent in job.dependents:
            dependent.waiting -= 1
            if dependent.waiting == 0:
                heapq.heappush(self.ready[dependent.core_id], (dependent.key, dependent))

        if now >= self.sim.hyperperiod_ns:
            return
        for label_id in dict.fromkeys(job.runnable.writes):
            for task in self.sim.model.tasks_triggered_by(label_id):
                runnables = tuple(self.sim.model.task_runnables(task))
                self._push_release(TaskJob(task, now, None, runnables))

    def _dispatch(self, core_id: str, now: int) -> None:
        queue = self.ready[core_id]
        if not queue:
            return
        current = self.running[core_id]
        if current is None:
            _, job = heapq.heappop(queue)
        elif self.preemptive and queue[0][0] < current.key:
            current.remaining = current.finish_at - now
            heapq.heappush(queue, (current.key, current))
            _, job = heapq.heappop(queue)
        else:
            return
        if job.start_ns is None:
            job.start_ns = now
        job.finish_at = now + job.remaining
        self.running[core_id] = job

    def _result(self) -> SimResult:
        cores = self.sim._cores
        records = tuple(
            JobRecord(
                runnable=job.runnable,
                task=job.task,
                release_ns=job.release_ns,
                start_ns=job.start_ns,
                finish_ns=job.finish_ns,
                absolute_deadline_ns=job.deadline_ns,
                core=cores[job.core_id],
                missed=job.deadline_ns is not None and job.finish_ns > job.deadline_ns,
            )
            for job in self.jobs
        )
        missed = sum(1 for record in records if record.missed)
        total = sum(1 for record in records if record.absolute_deadline_ns is not None)
        makespan = max((record.finish_ns for record in records), default=0)
        return SimResult(
            jobs=records,
            makespan_ns=makespan,
            missed_deadlines=missed,
            total_deadlines=total,
            hyperperiod_ns=self.sim.hyperperiod_ns,
        )


def _link(before: _Job, after: _Job) -> None:
    before.dependents.append(after)
    after.waiting += 1


def simulate(
    model: AmaltheaModel,
    platform: NocPlatform,
    allocation: Allocation,
    mode: ExecutionBound = ExecutionBound.WCET,
    preemptive: bool = True,
) -> SimResult:
    """Однократная симуляция; для многократной оценки используйте ScheduleSimulator"""
    return ScheduleSimulator(model, platform).simulate(allocation, mode, preemptive)


def write_trace_csv(result: SimResult, path: Union[str, Path]) -> None:
    """Трасса: одна строка на задание runnable"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRACE_COLUMNS)
        for job in result.jobs:
            writer.writerow([
                job.task.name,
                job.runnable.name,
                job.core.name,
                job.release_ns,
                job.start_ns,
                job.finish_ns,
                "" if job.absolute_deadline_ns is None else job.absolute_deadline_ns,
                int(job.missed),
            ])
    logger.info(f"Трасса записана в {path}: {len(result.jobs)} заданий")
