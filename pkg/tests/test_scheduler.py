# tests/test_scheduler.py - Симулятор гиперпериода: задания, сроки, порядок и сверка с эталоном

import csv
import itertools
import math
import random
import time

import pytest

from conftest import allocate, make_model, row_platform
from model import (
    ExecutionBound,
    InterProcessStimulus,
    PatternStimulus,
    PeriodicStimulus,
    SingleStimulus,
    SporadicStimulus,
    Task,
)
from services.allocation import AllocationError, all_on_core
from services.noc import platform_for_model
from services.scheduler import (
    TRACE_COLUMNS,
    ScheduleSimulator,
    SimulationError,
    count_deadlines,
    generate_jobs,
    simulate,
    write_trace_csv,
)


# ==================== ЗАДАНИЯ И СРОКИ ====================

def test_democar_job_counts(democar):
    jobs = generate_jobs(democar, democar.hyperperiod_ns())
    periodic = [job for job in jobs if job.deadline_ns is not None]
    assert len(periodic) == 36
    assert sum(len(job.runnables) for job in periodic) == 152
    assert all(job.deadline_ns == job.release_ns + 1000 * _period(democar, job.task) for job in periodic)


def _period(model, task):
    return model.stimulus_of_task(task).period_us


def test_generate_jobs_rejects_short_horizon(democar):
    with pytest.raises(ValueError):
        generate_jobs(democar, democar.hyperperiod_ns() - 1)


def test_time_triggered_releases():
    model = make_model(
        tasks=[("P", 9, 10, [("A", 1, [], [])])],
        labels={},
        extra_stimuli=[SporadicStimulus("Sp", 4), SingleStimulus("Si", 7), PatternStimulus("Pa", (1, 3, 12))],
        extra_tasks=[
            Task("Sporadic", "Sporadic", 3, "Sp", ("A",)),
            Task("Single", "Single", 2, "Si", ("A",)),
            Task("Pattern", "Pattern", 1, "Pa", ("A",)),
        ],
    )
    releases = {}
    for job in generate_jobs(model, model.hyperperiod_ns()):
        releases.setdefault(job.task.name, []).append(job.release_ns)
        if job.task.name != "P":
            assert job.deadline_ns is None
    assert releases["Sporadic"] == [0, 4000, 8000]
    assert releases["Single"] == [7000]
    assert releases["Pattern"] == [1000, 3000]


def test_democar_on_all_cores(democar_platform):
    model, platform = democar_platform
    simulator = ScheduleSimulator(model, platform)
    assert len(simulator.injections) == 10

    result = simulator.simulate(all_on_core(model, model.get_core(0).id))
    assert result.total_deadlines == 152
    assert result.missed_deadlines == 0
    assert result.hyperperiod_ns == 100_000_000
    # 152 периодических + 10 CylNum + 10 * 2 ActuatorTask
    assert len(result.jobs) == 182
    assert count_deadlines(result) == (0, 152)
    assert result.makespan_ns == max(job.finish_ns for job in result.jobs)


def test_actuator_follows_cylinder_events(democar_platform):
    model, platform = democar_platform
    result = simulate(model, platform, all_on_core(model, model.get_core(0).id))
    observers = sorted(j.finish_ns for j in result.jobs if j.runnable.name == "CylNumObserverEntity")
    actuators = sorted(j.release_ns for j in result.jobs if j.runnable.name == "IgnitionSWCSyncEntity")
    assert actuators == observers


def test_slow_clock_single_core_misses(democar):
    model, platform = platform_for_model(democar, 2, 2, 1, frequency_hz=1_000_000)
    result = simulate(model, platform, all_on_core(model, model.get_core(0).id))
    assert result.missed_deadlines > 0
    assert result.total_deadlines == 152


def test_bcet_makespan_not_above_wcet_on_one_core(democar_platform):
    model, platform = democar_platform
    allocation = all_on_core(model, model.get_core(2).id)
    simulator = ScheduleSimulator(model, platform)
    best = simulator.simulate(allocation, ExecutionBound.BCET)
    worst = simulator.simulate(allocation, ExecutionBound.WCET)
    assert best.makespan_ns <= worst.makespan_ns
    assert best.missed_deadlines <= worst.missed_deadlines


def test_simulation_is_deterministic(democar_platform):
    model, platform = democar_platform
    cores = [core.id for core in model.cores]
    rng = random.Random(7)
    allocation = allocate(
        model,
        {r.id: rng.choice(cores) for r in model.runnables},
        {l.id: rng.choice(cores) for l in model.labels},
    )
    assert simulate(model, platform, allocation) == simulate(model, platform, allocation)


def test_evaluation_performance(democar_platform):
    model, platform = democar_platform
    simulator = ScheduleSimulator(model, platform)
    allocation = all_on_core(model, model.get_core(0).id)
    timings = []
    for _ in range(3):
        start = time.perf_counter()
        simulator.simulate(allocation)
        timings.append(time.perf_counter() - start)
    assert min(timings) < 0.1


# ==================== ВЫТЕСНЕНИЕ И ПОРЯДОК ====================

@pytest.fixture
def two_tasks():
    return make_model(
        tasks=[
            ("High", 2, 2, [("H", 600, [], [])]),
            ("Low", 1, 4, [("L", 3000, [], [])]),
        ],
        labels={},
    )


def _by_runnable(result):
    return {(j.runnable.name, j.release_ns): j for j in result.jobs}


def test_preemptive_schedule(two_tasks):
    result = simulate(two_tasks, row_platform(two_tasks), allocate(two_tasks, {}, {}))
    jobs = _by_runnable(result)
    assert (jobs[("H", 0)].start_ns, jobs[("H", 0)].finish_ns) == (0, 600)
    assert (jobs[("L", 0)].start_ns, jobs[("L", 0)].finish_ns) == (600, 4200)
    assert (jobs[("H", 2000)].start_ns, jobs[("H", 2000)].finish_ns) == (2000, 2600)
    assert [j.runnable.name for j in result.jobs if j.missed] == ["L"]
    assert result.makespan_ns == 4200


def test_non_preemptive_schedule(two_tasks):
    simulator = ScheduleSimulator(two_tasks, row_platform(two_tasks))
    result = simulator.simulate(allocate(two_tasks, {}, {}), preemptive=False)
    jobs = _by_runnable(result)
    assert jobs[("L", 0)].finish_ns == 3600
    assert (jobs[("H", 2000)].start_ns, jobs[("H", 2000)].finish_ns) == (3600, 4200)
    assert [j.runnable.name for j in result.jobs if j.missed] == ["H"]


def test_remote_label_cost():
    model = make_model(
        tasks=[("T", 1, 1, [("R", 100, ["Big"], ["Small"])])],
        labels={"Big": 64, "Small": 8},
        cores=2,
    )
    simulator = ScheduleSimulator(model, row_platform(model, hop_latency_ns=10, flit_bits=32))
    remote = allocate(model, {"R": "C0"}, {"Big": "C1", "Small": "C1"})
    local = allocate(model, {"R": "C1"}, {"Big": "C1", "Small": "C1"})
    r = model.get_runnable(0)
    assert simulator.runnable_cost(r, remote, ExecutionBound.WCET) == 100 + 2 * 10 + 1 * 10
    assert simulator.runnable_cost(r, local, ExecutionBound.WCET) == 100


def test_same_instant_writer_runs_before_reader():
    model = make_model(
        tasks=[
            ("Writer", 1, 2, [("W", 100, [], ["X"])]),
            ("Reader", 2, 2, [("R", 50, ["X"], [])]),
        ],
        labels={"X": 8},
        cores=2,
    )
    result = simulate(model, row_platform(model), allocate(model, {"W": "C0", "R": "C1"}, {"X": "C0"}))
    jobs = _by_runnable(result)
    assert jobs[("W", 0)].finish_ns == 100
    assert (jobs[("R", 0)].start_ns, jobs[("R", 0)].finish_ns) == (100, 160)


def test_same_instant_cycle_keeps_higher_priority_writer():
    model = make_model(
        tasks=[
            ("A", 2, 2, [("RA", 100, ["Y"], ["X"])]),
            ("B", 1, 2, [("RB", 100, ["X"], ["Y"])]),
        ],
        labels={"X": 8, "Y": 8},
        cores=2,
    )
    allocation = allocate(model, {"RA": "C0", "RB": "C1"}, {"X": "C0", "Y": "C1"})
    jobs = _by_runnable(simulate(model, row_platform(model), allocation))
    # RA читает Y удалённо (+10), RB читает X удалённо (+10)
    assert (jobs[("RA", 0)].start_ns, jobs[("RA", 0)].finish_ns) == (0, 110)
    assert (jobs[("RB", 0)].start_ns, jobs[("RB", 0)].finish_ns) == (110, 220)


def test_activation_storm():
    model = make_model(
        tasks=[("P", 2, 10, [("W", 10, [], ["X"])])],
        labels={"X": 8},
        extra_stimuli=[InterProcessStimulus("S_Loop", "X")],
        extra_tasks=[Task("Loop", "Loop", 1, "S_Loop", ("W",))],
    )
    simulator = ScheduleSimulator(model, row_platform(model), max_jobs=50)
    with pytest.raises(SimulationError, match="activation storm"):
        simulator.simulate(allocate(model, {}, {}))


def test_invalid_allocations(democar):
    model, platform = platform_for_model(democar, 2, 2, 2)
    simulator = ScheduleSimulator(model, platform)
    inactive = all_on_core(model, model.get_core(3).id)
    with pytest.raises(AllocationError):
        simulator.simulate(inactive)

    allocation = all_on_core(model, model.get_core(0).id)
    partial = type(allocation)(
        runnable_core=dict(list(allocation.runnable_core.items())[1:]),
        label_core=allocation.label_core,
    )
    with pytest.raises(AllocationError):
        simulator.simulate(partial)


def test_trace_csv(tmp_path, two_tasks):
    result = simulate(two_tasks, row_platform(two_tasks), allocate(two_tasks, {}, {}))
    path = tmp_path / "trace.csv"
    write_trace_csv(result, path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == TRACE_COLUMNS
    assert len(rows) == 1 + len(result.jobs)
    missed = [row for row in rows[1:] if row[-1] == "1"]
    assert [row[1] for row in missed] == ["L"]


# ==================== ЭТАЛОН: ПОТАКТОВАЯ ВРЕМЕННАЯ ДИАГРАММА ====================

def brute_force_timeline(model, allocation, hop_ns, flit_bits):
    """
    Независимый потактовый построитель расписания (1 такт = 1 нс, частота 1 ГГц).

    Периодические задачи и задачи InterProcess без периода инжекции,
    вытесняющее планирование.
    """
    positions = {core.id: core.position for core in model.cores}
    bits = {label.id: label.bit_length for label in model.labels}

    def latency(label_id, src, dst):
        (sx, sy), (dx, dy) = positions[src], positions[dst]
        hops = abs(sx - dx) + abs(sy - dy)
        return hops * hop_ns * math.ceil(bits[label_id] / flit_bits)

    def cost(runnable):
        core = allocation.runnable_core[runnable.id]
        total = runnable.wcet_instructions
        total += sum(latency(l, allocation.label_core[l], core) for l in runnable.reads)
        total += sum(latency(l, core, allocation.label_core[l]) for l in runnable.writes)
        return total

    periods, triggers = {}, {}
    for task in model.tasks:
        stimulus = model.stimulus_of_task(task)
        if isinstance(stimulus, PeriodicStimulus):
            periods[task.id] = stimulus.period_us * 1000
        else:
            triggers.setdefault(stimulus.trigger_label, []).append(task)
    horizon = math.lcm(*periods.values())
    writes = {t.id: {l for r in model.task_runnables(t) for l in r.writes} for t in model.tasks}
    reads = {t.id: {l for r in model.task_runnables(t) for l in r.reads} for t in model.tasks}

    pending = {}
    for task in model.tasks:
        if task.id in periods:
            for release in range(0, horizon, periods[task.id]):
                pending.setdefault(release, []).append(task)

    def reachable(adjacency, start, goal):
        stack, seen = [start], set()
        while stack:
            node = stack.pop()
            if node == goal:
                return True
            if node not in seen:
                seen.add(node)
                stack.extend(adjacency.get(node, ()))
        return False

    def release(now, tasks):
        group = []
        for task in tasks:
            deadline = now + periods[task.id] if task.id in periods else None
            chain = []
            for position, runnable in enumerate(model.task_runnables(task)):
                job = {
                    "task": task, "runnable": runnable, "release": now, "deadline": deadline,
                    "core": allocation.runnable_core[runnable.id], "remaining": cost(runnable),
                    "preds": [], "start": None, "finish": None,
                    "key": (-task.priority, now, task.name, position),
                }
                if chain:
                    job["preds"].append(chain[-1])
                chain.append(job)
            group.append((task, chain))

        candidates = [
            (w, r) for w, _ in group for r, _ in group
            if w.id != r.id and writes[w.id] & reads[r.id]
        ]
        candidates.sort(key=lambda c: (-c[0].priority, -c[1].priority, c[0].name, c[1].name))
        adjacency = {}
        chains = {task.id: chain for task, chain in group}
        for w, r in candidates:
            if reachable(adjacency, r.id, w.id):
                continue
            adjacency.setdefault(w.id, []).append(r.id)
            shared = writes[w.id] & reads[r.id]
            for reader in chains[r.id]:
                needed = shared & set(reader["runnable"].reads)
                for writer in chains[w.id]:
                    if needed & set(writer["runnable"].writes):
                        reader["preds"].append(writer)
        return [job for _, chain in group for job in chain]

    jobs, live = [], []
    cores = sorted({job_core for job_core in allocation.runnable_core.values()})
    t = 0
    while True:
        if t in pending:
            created = release(t, pending.pop(t))
            jobs.extend(created)
            live.extend(created)
        busy, finished = False, []
        for core in cores:
            for job in sorted((j for j in live if j["core"] == core), key=lambda j: j["key"]):
                if any(p["finish"] is None or p["finish"] > t for p in job["preds"]):
                    continue
                if job["start"] is None:
                    job["start"] = t
                job["remaining"] -= 1
                if job["remaining"] == 0:
                    job["finish"] = t + 1
                    finished.append(job)
                busy = True
                break
        for job in finished:
            live.remove(job)
            if t + 1 < horizon:
                for label_id in dict.fromkeys(job["runnable"].writes):
                    for task in triggers.get(label_id, ()):
                        pending.setdefault(t + 1, []).append(task)
        if busy:
            t += 1
        elif pending:
            t = min(pending)
        else:
            return jobs


def _tiny_family():
    """Все сочетания периодов 1-3 задач, одного или двух ядер и задачи по событию"""
    periods = [p for count in (1, 2, 3) for p in itertools.product((1, 2, 3), repeat=count)]
    return [(seed, *case) for seed, case in enumerate(itertools.product(periods, (1, 2), (False, True)))]


def _tiny_case(seed, periods, cores, with_trigger):
    """
    Модель семейства: периоды и ядра заданы, остальное выбирается по seed.

    С задачей по событию метку L0 пишет только T0R0, а задача Ev читает L0.
    """
    rng = random.Random(seed)
    labels = {f"L{i}": rng.choice([8, 16, 32, 64]) for i in range(4)}
    names = list(labels)
    writable = names[1:] if with_trigger else names
    priorities = rng.sample(range(1, 10), len(periods) + 1)
    tasks = []
    for i, period in enumerate(periods):
        calls = []
        for j in range(rng.randint(1, 3)):
            writes = rng.sample(writable, rng.randint(0, 2))
            if with_trigger and i == j == 0:
                writes.append("L0")
            calls.append((f"T{i}R{j}", rng.randint(20, 200), rng.sample(names, rng.randint(0, 2)), writes))
        tasks.append((f"T{i}", priorities[i], period, calls))
    triggered = []
    if with_trigger:
        reads = ["L0"] + rng.sample(names[1:], rng.randint(0, 1))
        triggered.append(("Ev", priorities[-1], "L0", [("EvR", rng.randint(20, 200), reads, rng.sample(names[1:], rng.randint(0, 1)))]))
    model = make_model(tasks=tasks, labels=labels, cores=cores, triggered=triggered)
    core_ids = [core.id for core in model.cores]
    allocation = allocate(
        model,
        {r.id: rng.choice(core_ids) for r in model.runnables},
        {l.id: rng.choice(core_ids) for l in model.labels},
    )
    return model, allocation


TINY_FAMILY = _tiny_family()


@pytest.mark.parametrize("seed,periods,cores,with_trigger", TINY_FAMILY)
def test_matches_brute_force_timeline(seed, periods, cores, with_trigger):
    model, allocation = _tiny_case(seed, periods, cores, with_trigger)
    platform = row_platform(model, hop_latency_ns=10, flit_bits=32)
    result = simulate(model, platform, allocation)
    expected = brute_force_timeline(model, allocation, hop_ns=10, flit_bits=32)

    actual = sorted(
        (j.task.name, j.runnable.name, j.release_ns, j.start_ns, j.finish_ns) for j in result.jobs
    )
    oracle = sorted(
        (j["task"].name, j["runnable"].name, j["release"], j["start"], j["finish"]) for j in expected
    )
    assert actual == oracle
    with_deadline = [j for j in expected if j["deadline"] is not None]
    assert result.total_deadlines == len(with_deadline)
    assert result.missed_deadlines == sum(1 for j in with_deadline if j["finish"] > j["deadline"])
    assert result.makespan_ns == max(j["finish"] for j in expected)


def test_tiny_family_covers_triggered_releases():
    triggered = 0
    for case in TINY_FAMILY:
        if case[-1]:
            model, allocation = _tiny_case(*case)
            result = simulate(model, row_platform(model), allocation)
            triggered += any(j.task.name == "Ev" for j in result.jobs)
    assert triggered > 0


# ==================== АУДИТ ТРАССЫ ====================

def assert_priority_sound(model, result, preemptive=True):
    """
    Проверка трассы по ядрам без эталона.

    Вытесняющий режим: задание не начинается, пока на его ядре не завершено
    начатое более приоритетное; более приоритетное, начатое во время задания,
    завершается раньше него. Невытесняющий: интервалы на ядре не пересекаются.
    """
    positions = {
        task.id: {runnable.id: i for i, runnable in enumerate(model.task_runnables(task))}
        for task in model.tasks
    }

    def key(job):
        return (-job.task.priority, job.release_ns, job.task.name, positions[job.task.id][job.runnable.id])

    by_core, by_activation = {}, {}
    for job in result.jobs:
        assert job.release_ns <= job.start_ns < job.finish_ns
        by_core.setdefault(job.core.id, []).append(job)
        by_activation.setdefault((job.task.id, job.release_ns), []).append(job)

    for chain in by_activation.values():
        chain.sort(key=key)
        for before, after in zip(chain, chain[1:]):
            assert before.finish_ns <= after.start_ns

    for jobs in by_core.values():
        for job in jobs:
            for other in jobs:
                if other is job:
                    continue
                assert other.start_ns != job.start_ns
                if not preemptive:
                    assert other.finish_ns <= job.start_ns or job.finish_ns <= other.start_ns
                elif key(other) < key(job):
                    assert not other.start_ns < job.start_ns < other.finish_ns
                    if job.start_ns < other.start_ns < job.finish_ns:
                        assert other.finish_ns <= job.finish_ns


@pytest.mark.parametrize("preemptive", [True, False])
def test_trace_audit_over_tiny_family(preemptive):
    for case in TINY_FAMILY:
        model, allocation = _tiny_case(*case)
        simulator = ScheduleSimulator(model, row_platform(model, hop_latency_ns=10, flit_bits=32))
        assert_priority_sound(model, simulator.simulate(allocation, preemptive=preemptive), preemptive)


def test_trace_audit_democar(democar_platform):
    model, platform = democar_platform
    allocation = all_on_core(model, model.get_core(0).id)
    assert_priority_sound(model, simulate(model, platform, allocation))


@pytest.mark.parametrize("reads,expected", [
    (["Data"], {"W": (1000, 1100), "E": (1100, 1150)}),
    ([], {"E": (1000, 1050), "W": (1050, 1150)}),
])
def test_triggered_reader_waits_for_same_instant_writer(reads, expected):
    # Src завершается в 1000 нс и активирует Ev одновременно со второй активацией Wr
    model = make_model(
        tasks=[
            ("Src", 3, 2, [("S", 1000, [], ["Go"])]),
            ("Wr", 1, 1, [("W", 100, [], ["Data"])]),
        ],
        labels={"Go": 8, "Data": 8},
        cores=2,
        triggered=[("Ev", 5, "Go", [("E", 50, reads, [])])],
    )
    allocation = allocate(model, {"S": "C0", "W": "C1", "E": "C1"}, {"Go": "C0", "Data": "C1"})
    result = simulate(model, row_platform(model), allocation)
    jobs = {(j.runnable.name, j.release_ns): j for j in result.jobs}
    assert [key for key in jobs if key[0] == "E"] == [("E", 1000)]
    for name, span in expected.items():
        assert (jobs[(name, 1000)].start_ns, jobs[(name, 1000)].finish_ns) == span
    assert_priority_sound(model, result)
