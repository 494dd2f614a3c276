# model/validation.py - Проверка инвариантов модели
# Нарушения возвращаются данными, а не исключениями

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List

from model.models import (
    InterProcessStimulus,
    PatternStimulus,
    PeriodicStimulus,
    SingleStimulus,
    SporadicStimulus,
)


@dataclass(frozen=True)
class Violation:
    """Нарушение правила: какая сущность и какое правило"""
    entity: str  # id сущности
    rule: str
    message: str

    def __str__(self):
        return f"{self.entity}: {self.rule} - {self.message}"


class ModelValidationError(Exception):
    """Модель не прошла проверку; violations содержит отчёт"""

    def __init__(self, violations: List[Violation]):
        self.violations = list(violations)
        details = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"Модель содержит {len(self.violations)} нарушений: {details}")


# Символы, недопустимые в тексте XML 1.0
_NON_XML_CHARS = re.compile("[^\t\n\r\x20-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")


def _duplicates(values: Iterable[str]) -> List[str]:
    return [value for value, count in Counter(values).items() if count > 1]


def validate(model) -> List[Violation]:
    """
    Проверяет инварианты типов и разрешимость всех ссылок.

    Args:
        model: AmaltheaModel

    Returns:
        Список нарушений; пустой список означает корректную модель
    """
    violations: List[Violation] = []

    def report(entity: str, rule: str, message: str):
        violations.append(Violation(entity=entity, rule=rule, message=message))

    # Уникальность id и имён
    for registry in (model.labels, model.runnables, model.tasks, model.stimuli,
                     model.core_types, model.quartzes, model.cores):
        for dup in _duplicates(item.id for item in registry):
            report(dup, "duplicate id", f"{registry.kind} id встречается несколько раз")
    for registry in (model.labels, model.runnables, model.tasks, model.cores):
        for dup in _duplicates(item.name for item in registry):
            report(dup, "duplicate name", f"{registry.kind} имя встречается несколько раз")
    for registry in (model.labels, model.runnables, model.tasks, model.stimuli,
                     model.core_types, model.quartzes, model.cores):
        for item in registry:
            for field_name in ("id", "name"):
                text = getattr(item, field_name, None)
                if text is not None and _NON_XML_CHARS.search(text):
                    report(item.id, "xml text", f"{field_name} {text!r} нельзя записать в XML")

    for label in model.labels:
        if label.bit_length < 1:
            report(label.id, "bit length", f"bit_length={label.bit_length} < 1")

    for runnable in model.runnables:
        if runnable.size_bits < 0:
            report(runnable.id, "size", f"size_bits={runnable.size_bits} < 0")
        if runnable.bcet_instructions < 1 or runnable.wcet_instructions < 1:
            report(runnable.id, "execution bounds", "BCET и WCET должны быть положительными")
        if runnable.bcet_instructions > runnable.wcet_instructions:
            report(runnable.id, "execution bounds",
                   f"BCET {runnable.bcet_instructions} > WCET {runnable.wcet_instructions}")
        for label_id in list(runnable.reads) + list(runnable.writes):
            if model.labels.by_id(label_id) is None:
                report(runnable.id, "dangling label ref", f"метка {label_id!r} не объявлена")
        for access, refs in (("reads", runnable.reads), ("writes", runnable.writes)):
            for dup in _duplicates(refs):
                report(runnable.id, "duplicate label ref", f"{access} содержит {dup!r} несколько раз")

    for dup in _duplicates(str(task.priority) for task in model.tasks):
        report(dup, "duplicate priority", f"приоритет {dup} у нескольких задач")

    for task in model.tasks:
        if task.priority < 0:
            report(task.id, "priority", f"приоритет {task.priority} < 0")
        if not task.runnables:
            report(task.id, "empty task", "задача не вызывает ни одного runnable")
        for runnable_id in task.runnables:
            if model.runnables.by_id(runnable_id) is None:
                report(task.id, "dangling runnable ref", f"runnable {runnable_id!r} не объявлен")
        if model.stimuli.by_id(task.stimulus) is None:
            report(task.id, "dangling stimulus ref", f"стимул {task.stimulus!r} не объявлен")

    for stimulus in model.stimuli:
        if isinstance(stimulus, PeriodicStimulus):
            if stimulus.period_us < 1:
                report(stimulus.id, "period", f"period={stimulus.period_us} < 1")
            if stimulus.offset_us < 0:
                report(stimulus.id, "offset", f"offset={stimulus.offset_us} < 0")
        elif isinstance(stimulus, SporadicStimulus):
            if stimulus.min_inter_arrival_us < 1:
                report(stimulus.id, "min inter-arrival", f"{stimulus.min_inter_arrival_us} < 1")
        elif isinstance(stimulus, SingleStimulus):
            if stimulus.time_us < 0:
                report(stimulus.id, "time", f"time={stimulus.time_us} < 0")
        elif isinstance(stimulus, PatternStimulus):
            times = stimulus.times_us
            if not times:
                report(stimulus.id, "pattern", "пустой шаблон активаций")
            if any(t < 0 for t in times):
                report(stimulus.id, "pattern", "отрицательный момент активации")
            if any(a >= b for a, b in zip(times, times[1:])):
                report(stimulus.id, "pattern", "моменты активации не строго возрастают")
        elif isinstance(stimulus, InterProcessStimulus):
            if model.labels.by_id(stimulus.trigger_label) is None:
                report(stimulus.id, "dangling label ref", f"метка {stimulus.trigger_label!r} не объявлена")
            if stimulus.injection_period_us is not None and stimulus.injection_period_us < 1:
                report(stimulus.id, "injection period", f"{stimulus.injection_period_us} < 1")

    for core_type in model.core_types:
        if core_type.ticks_per_instruction < 1:
            report(core_type.id, "ticks per instruction", f"{core_type.ticks_per_instruction} < 1")
    for quartz in model.quartzes:
        if quartz.frequency_hz < 1:
            report(quartz.id, "frequency", f"{quartz.frequency_hz} < 1")

    for core in model.cores:
        if model.core_types.by_id(core.core_type) is None:
            report(core.id, "dangling core type ref", f"тип ядра {core.core_type!r} не объявлен")
        if model.quartzes.by_id(core.quartz) is None:
            report(core.id, "dangling quartz ref", f"кварц {core.quartz!r} не объявлен")
    positions = Counter(core.position for core in model.cores)
    for core in model.cores:
        if positions[core.position] > 1:
            report(core.id, "duplicate position", f"позиция {core.position} занята несколькими ядрами")

    return violations
