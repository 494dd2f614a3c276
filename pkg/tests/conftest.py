# tests/conftest.py - Общие фикстуры и построители маленьких моделей

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pytest

from model import (
    AmaltheaModel,
    Core,
    CoreType,
    InterProcessStimulus,
    Label,
    PeriodicStimulus,
    Quartz,
    Runnable,
    Task,
)
from services.allocation import Allocation
from services.democar import build_democar
from services.noc import NocPlatform, platform_for_model

GHZ = 1_000_000_000  # при 1 такте на инструкцию 1 инструкция = 1 нс

MINIMAL_XML = """<?xml version="1.0" encoding="UTF-8"?>
<amalthea>
  <swModel>
    <task id="T" name="T" priority="1" stimulus="S"><call runnable="R"/></task>
    <runnable id="R" name="R" sizeBits="8" bcet="1" wcet="2"><read label="A"/><write label="B"/></runnable>
    <label id="A" name="A" bitLength="8"/>
    <label id="B" name="B" bitLength="16"/>
  </swModel>
  <stimuliModel>
    <stimulus id="S" type="periodic" period="1000"/>
  </stimuliModel>
  <hwModel>
    <coreType id="CT" ticksPerInstruction="1"/>
    <quartz id="Q" frequencyHz="1000000000"/>
    <core id="C0" name="C0" coreType="CT" quartz="Q" x="0" y="0"/>
  </hwModel>
</amalthea>
"""


def make_cores(count: int, active: Optional[int] = None) -> List[Core]:
    """Ядра в одну строку сетки count x 1"""
    active = count if active is None else active
    return [Core(f"C{i}", f"C{i}", "CT", "Q", i, 0, i < active) for i in range(count)]


def make_model(
    tasks: Sequence[Tuple[str, int, int, Sequence[Tuple[str, int, Sequence[str], Sequence[str]]]]],
    labels: Dict[str, int],
    cores: int = 1,
    frequency_hz: int = GHZ,
    extra_stimuli: Iterable = (),
    extra_tasks: Iterable[Task] = (),
    triggered: Sequence[Tuple[str, int, str, Sequence[Tuple[str, int, Sequence[str], Sequence[str]]]]] = (),
) -> AmaltheaModel:
    """
    Модель из периодических задач.

    tasks: (имя, приоритет, период мкс, [(runnable, инструкции, чтения, записи), ...])
    labels: имя метки → длина в битах
    triggered: задачи InterProcess (имя, приоритет, метка-триггер, [runnable, ...])
    """
    model_tasks, runnables, stimuli = [], [], []
    for name, priority, period_us, calls in tasks:
        stimuli.append(PeriodicStimulus(id=f"S_{name}", period_us=period_us))
        model_tasks.append(Task(name, name, priority, f"S_{name}", tuple(r for r, *_ in calls)))
        for runnable, instructions, reads, writes in calls:
            runnables.append(Runnable(runnable, runnable, 0, tuple(reads), tuple(writes), instructions, instructions))
    for name, priority, label, calls in triggered:
        stimuli.append(InterProcessStimulus(f"S_{name}", label))
        model_tasks.append(Task(name, name, priority, f"S_{name}", tuple(r for r, *_ in calls)))
        for runnable, instructions, reads, writes in calls:
            runnables.append(Runnable(runnable, runnable, 0, tuple(reads), tuple(writes), instructions, instructions))
    return AmaltheaModel(
        labels=[Label(name, name, bits) for name, bits in labels.items()],
        runnables=runnables,
        tasks=model_tasks + list(extra_tasks),
        stimuli=stimuli + list(extra_stimuli),
        core_types=[CoreType("CT", 1)],
        quartzes=[Quartz("Q", frequency_hz)],
        cores=make_cores(cores),
    )


def row_platform(model: AmaltheaModel, **kwargs) -> NocPlatform:
    return NocPlatform.from_model(model, model.core_count(), 1, **kwargs)


def allocate(model: AmaltheaModel, runnable_core: Dict[str, str], label_core: Dict[str, str]) -> Allocation:
    """Размещение по id; не указанное - на C0"""
    return Allocation(
        runnable_core={r.id: runnable_core.get(r.id, "C0") for r in model.runnables},
        label_core={l.id: label_core.get(l.id, "C0") for l in model.labels},
    )


@pytest.fixture(scope="session")
def democar() -> AmaltheaModel:
    return build_democar()


@pytest.fixture(scope="session")
def democar_platform(democar):
    """DemoCar на сетке 2x2 со всеми ядрами"""
    return platform_for_model(democar, 2, 2, 4)


@pytest.fixture
def minimal_xml() -> str:
    return MINIMAL_XML
