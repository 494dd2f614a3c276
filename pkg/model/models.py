# model/models.py - Сущности модели AMALTHEA
# Программная модель (метки, runnable, задачи, стимулы) и аппаратная (ядра, типы ядер, кварцы)

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union


class ExecutionBound(Enum):
    """Граница времени выполнения runnable"""
    BCET = "bcet"
    WCET = "wcet"


@dataclass(frozen=True)
class Label:
    """Метка - элемент данных фиксированной длины"""
    id: str
    name: str
    bit_length: int  # длина в битах


@dataclass(frozen=True)
class Runnable:
    """Исполняемая сущность: чтение/запись меток и границы времени выполнения в инструкциях"""
    id: str
    name: str
    size_bits: int  # объём в памяти, биты
    reads: Tuple[str, ...]  # id читаемых меток, в порядке модели
    writes: Tuple[str, ...]  # id записываемых меток
    bcet_instructions: int
    wcet_instructions: int

    def instructions(self, bound: ExecutionBound) -> int:
        if bound is ExecutionBound.BCET:
            return self.bcet_instructions
        return self.wcet_instructions


@dataclass(frozen=True)
class Task:
    """Задача: упорядоченный список runnable с одним приоритетом и одним стимулом"""
    id: str
    name: str
    priority: int  # больше значение - выше срочность
    stimulus: str  # id стимула
    runnables: Tuple[str, ...]  # id runnable в порядке исполнения


@dataclass(frozen=True)
class PeriodicStimulus:
    id: str
    period_us: int
    offset_us: int = 0


@dataclass(frozen=True)
class SporadicStimulus:
    id: str
    min_inter_arrival_us: int


@dataclass(frozen=True)
class SingleStimulus:
    id: str
    time_us: int


@dataclass(frozen=True)
class PatternStimulus:
    id: str
    times_us: Tuple[int, ...]  # строго возрастающие моменты активации


@dataclass(frozen=True)
class InterProcessStimulus:
    """
    Активация записью метки другим процессом.

    injection_period_us - необязательный период внешних событий
    (например, события коленвала), когда метку не пишет ни один runnable.
    """
    id: str
    trigger_label: str  # id метки
    injection_period_us: Optional[int] = None


Stimulus = Union[
    PeriodicStimulus,
    SporadicStimulus,
    SingleStimulus,
    PatternStimulus,
    InterProcessStimulus,
]


@dataclass(frozen=True)
class CoreType:
    id: str
    ticks_per_instruction: int


@dataclass(frozen=True)
class Quartz:
    id: str
    frequency_hz: int


@dataclass(frozen=True)
class Core:
    """Вычислительное ядро в узле сетки (x, y)"""
    id: str
    name: str
    core_type: str  # id типа ядра
    quartz: str  # id кварца
    x: int
    y: int
    active: bool = True  # выключенное ядро маршрутизирует, но не вычисляет

    @property
    def position(self) -> Tuple[int, int]:
        return (self.x, self.y)
