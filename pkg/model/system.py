# model/system.py - Контейнер модели AMALTHEA с API запросов
# Списки + словари по id/имени для каждого вида сущностей, производные структуры

import logging
import math
from dataclasses import dataclass
from typing import Dict, Generic, Iterable, Iterator, List, Optional, Tuple, TypeVar

from model.models import (
    Core,
    CoreType,
    ExecutionBound,
    InterProcessStimulus,
    Label,
    PeriodicStimulus,
    Quartz,
    Runnable,
    Stimulus,
    Task,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")

NS_PER_US = 1000


class ModelError(Exception):
    """Нарушение контракта API модели (чужая сущность, нет гиперпериода и т.п.)"""


class EntityRegistry(Generic[T]):
    """
    Упорядоченный список сущностей одного вида со словарями по id и имени.

    При дублирующихся id/именах словари указывают на первую сущность,
    сами дубликаты сообщает validate().
    """

    def __init__(self, kind: str, items: Iterable[T], named: bool = True):
        self.kind = kind
        self._items: Tuple[T, ...] = tuple(items)
        self._index: Dict[str, int] = {}
        self._by_name: Dict[str, T] = {}

        for i, item in enumerate(self._items):
            self._index.setdefault(item.id, i)
            if named:
                self._by_name.setdefault(item.name, item)

    def get(self, index: int) -> T:
        if not 0 <= index < len(self._items):
            raise IndexError(f"{self.kind}: индекс {index} вне диапазона [0, {len(self._items)})")
        return self._items[index]

    def by_id(self, entity_id: str) -> Optional[T]:
        index = self._index.get(entity_id)
        return None if index is None else self._items[index]

    def by_name(self, name: str) -> Optional[T]:
        return self._by_name.get(name)

    def index_of(self, item: T) -> int:
        index = self._index.get(item.id)
        if index is None or self._items[index] != item:
            raise ModelError(f"{self.kind} {item.id!r} не принадлежит модели")
        return index

    def contains(self, item: T) -> bool:
        index = self._index.get(item.id)
        return index is not None and self._items[index] == item

    def count(self) -> int:
        return len(self._items)

    @property
    def items(self) -> Tuple[T, ...]:
        return self._items

    def __iter__(self) -> Iterator[T]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)


@dataclass(frozen=True)
class DependencyEdge:
    """Писатель метки должен выполняться раньше читателя той же метки"""
    writer: Runnable
    reader: Runnable
    label: Label


def execution_time_ns(instructions: int, ticks_per_instruction: int, frequency_hz: int) -> int:
    """
    Время выполнения в наносекундах с округлением до ближайшего, не меньше 1 нс.

    Args:
        instructions: Число инструкций (BCET или WCET)
        ticks_per_instruction: Тактов на инструкцию (CoreType)
        frequency_hz: Частота кварца

    Returns:
        instructions * ticks * 10^9 / frequency_hz
    """
    numerator = instructions * ticks_per_instruction * 10 ** 9
    return max(1, (2 * numerator + frequency_hz) // (2 * frequency_hz))


class AmaltheaModel:
    """
    Модель AMALTHEA: программная и аппаратная части.

    После построения модель не изменяется; with_hardware() возвращает новую.
    """

    def __init__(
        self,
        labels: Iterable[Label] = (),
        runnables: Iterable[Runnable] = (),
        tasks: Iterable[Task] = (),
        stimuli: Iterable[Stimulus] = (),
        core_types: Iterable[CoreType] = (),
        quartzes: Iterable[Quartz] = (),
        cores: Iterable[Core] = (),
    ):
        self.labels: EntityRegistry[Label] = EntityRegistry("Label", labels)
        self.runnables: EntityRegistry[Runnable] = EntityRegistry("Runnable", runnables)
        self.tasks: EntityRegistry[Task] = EntityRegistry("Task", tasks)
        self.stimuli: EntityRegistry[Stimulus] = EntityRegistry("Stimulus", stimuli, named=False)
        self.core_types: EntityRegistry[CoreType] = EntityRegistry("CoreType", core_types, named=False)
        self.quartzes: EntityRegistry[Quartz] = EntityRegistry("Quartz", quartzes, named=False)
        self.cores: EntityRegistry[Core] = EntityRegistry("Core", cores)

        # Производные карты читателей/писателей в порядке runnable модели
        self._readers: Dict[str, List[Runnable]] = {label.id: [] for label in self.labels}
        self._writers: Dict[str, List[Runnable]] = {label.id: [] for label in self.labels}
        for runnable in self.runnables:
            for label_id in dict.fromkeys(runnable.reads):
                self._readers.setdefault(label_id, []).append(runnable)
            for label_id in dict.fromkeys(runnable.writes):
                self._writers.setdefault(label_id, []).append(runnable)

        self._tasks_of_runnable: Dict[str, List[Task]] = {}
        for task in self.tasks:
            for runnable_id in task.runnables:
                self._tasks_of_runnable.setdefault(runnable_id, []).append(task)

        self._triggered: Dict[str, List[Task]] = {}
        for task in self.tasks:
            stimulus = self.stimuli.by_id(task.stimulus)
            if isinstance(stimulus, InterProcessStimulus):
                self._triggered.setdefault(stimulus.trigger_label, []).append(task)

    # ==================== МЕТКИ ====================

    def get_label(self, index: int) -> Label:
        return self.labels.get(index)

    def get_label_by_id(self, label_id: str) -> Optional[Label]:
        return self.labels.by_id(label_id)

    def get_label_by_name(self, name: str) -> Optional[Label]:
        return self.labels.by_name(name)

    def index_of_label(self, label: Label) -> int:
        return self.labels.index_of(label)

    def label_count(self) -> int:
        return self.labels.count()

    def label_writers(self, label: Label) -> List[Runnable]:
        """Runnable, записывающие метку, в порядке модели"""
        self._require_label(label)
        return list(self._writers.get(label.id, []))

    def label_readers(self, label: Label) -> List[Runnable]:
        """Runnable, читающие метку, в порядке модели"""
        self._require_label(label)
        return list(self._readers.get(label.id, []))

    def _require_label(self, label: Label) -> None:
        if not self.labels.contains(label):
            raise ModelError(f"Метка {label.id!r} не принадлежит модели")

    # ==================== RUNNABLE И ЗАДАЧИ ====================

    def get_runnable(self, index: int) -> Runnable:
        return self.runnables.get(index)

    def get_runnable_by_id(self, runnable_id: str) -> Optional[Runnable]:
        return self.runnables.by_id(runnable_id)

    def get_runnable_by_name(self, name: str) -> Optional[Runnable]:
        return self.runnables.by_name(name)

    def index_of_runnable(self, runnable: Runnable) -> int:
        return self.runnables.index_of(runnable)

    def runnable_count(self) -> int:
        return self.runnables.count()

    def get_task(self, index: int) -> Task:
        return self.tasks.get(index)

    def get_task_by_id(self, task_id: str) -> Optional[Task]:
        return self.tasks.by_id(task_id)

    def get_task_by_name(self, name: str) -> Optional[Task]:
        return self.tasks.by_name(name)

    def index_of_task(self, task: Task) -> int:
        return self.tasks.index_of(task)

    def task_count(self) -> int:
        return self.tasks.count()

    def task_runnables(self, task: Task) -> List[Runnable]:
        return [self.runnables.by_id(runnable_id) for runnable_id in task.runnables]

    def tasks_of_runnable(self, runnable: Runnable) -> List[Task]:
        return list(self._tasks_of_runnable.get(runnable.id, []))

    def tasks_triggered_by(self, label_id: str) -> List[Task]:
        """Задачи со стимулом InterProcess на указанную метку"""
        return list(self._triggered.get(label_id, []))

    # ==================== СТИМУЛЫ ====================

    def get_stimulus(self, index: int) -> Stimulus:
        return self.stimuli.get(index)

    def get_stimulus_by_id(self, stimulus_id: str) -> Optional[Stimulus]:
        return self.stimuli.by_id(stimulus_id)

    def index_of_stimulus(self, stimulus: Stimulus) -> int:
        return self.stimuli.index_of(stimulus)

    def stimulus_count(self) -> int:
        return self.stimuli.count()

    def stimulus_of_task(self, task: Task) -> Optional[Stimulus]:
        return self.stimuli.by_id(task.stimulus)

    # ==================== АППАРАТНАЯ МОДЕЛЬ ====================

    def get_core(self, index: int) -> Core:
        return self.cores.get(index)

    def get_core_by_id(self, core_id: str) -> Optional[Core]:
        return self.cores.by_id(core_id)

    def get_core_by_name(self, name: str) -> Optional[Core]:
        return self.cores.by_name(name)

    def index_of_core(self, core: Core) -> int:
        return self.cores.index_of(core)

    def core_count(self) -> int:
        return self.cores.count()

    def get_core_type(self, core_type_id: str) -> Optional[CoreType]:
        return self.core_types.by_id(core_type_id)

    def core_type_count(self) -> int:
        return self.core_types.count()

    def get_quartz(self, quartz_id: str) -> Optional[Quartz]:
        return self.quartzes.by_id(quartz_id)

    def quartz_count(self) -> int:
        return self.quartzes.count()

    def with_hardware(
        self,
        core_types: Iterable[CoreType],
        quartzes: Iterable[Quartz],
        cores: Iterable[Core],
    ) -> "AmaltheaModel":
        """Та же программная модель с другой аппаратной частью"""
        return AmaltheaModel(
            labels=self.labels.items,
            runnables=self.runnables.items,
            tasks=self.tasks.items,
            stimuli=self.stimuli.items,
            core_types=core_types,
            quartzes=quartzes,
            cores=cores,
        )

    # ==================== ПРОИЗВОДНЫЕ ВЕЛИЧИНЫ ====================

    def periodic_tasks(self) -> List[Tuple[Task, PeriodicStimulus]]:
        result = []
        for task in self.tasks:
            stimulus = self.stimuli.by_id(task.stimulus)
            if isinstance(stimulus, PeriodicStimulus):
                result.append((task, stimulus))
        return result

    def hyperperiod(self) -> int:
        """
        Гиперпериод в мкс: НОК периодов всех периодических задач.

        Raises:
            ModelError: В модели нет периодических задач
        """
        periods = [stimulus.period_us for _, stimulus in self.periodic_tasks()]
        if not periods:
            raise ModelError("no hyperperiod defined: в модели нет периодических задач")
        return math.lcm(*periods)

    def hyperperiod_ns(self) -> int:
        return self.hyperperiod() * NS_PER_US

    def dependencies(self) -> List[DependencyEdge]:
        """Рёбра писатель → читатель для каждой метки"""
        edges = []
        for label in self.labels:
            for writer in self._writers.get(label.id, []):
                for reader in self._readers.get(label.id, []):
                    if reader.id != writer.id:
                        edges.append(DependencyEdge(writer=writer, reader=reader, label=label))
        return edges

    def execution_time(self, runnable: Runnable, core: Core, bound: ExecutionBound) -> int:
        """
        Время выполнения runnable на ядре, нс.

        Args:
            runnable: Runnable модели
            core: Ядро модели (его тип и кварц должны разрешаться)
            bound: BCET или WCET

        Returns:
            Время в наносекундах, не меньше 1
        """
        core_type = self.core_types.by_id(core.core_type)
        quartz = self.quartzes.by_id(core.quartz)
        if core_type is None or quartz is None:
            raise ModelError(f"Ядро {core.id!r}: не разрешается тип ядра или кварц")
        return execution_time_ns(
            runnable.instructions(bound),
            core_type.ticks_per_instruction,
            quartz.frequency_hz,
        )

    def validate(self):
        """Список нарушений инвариантов (пустой - модель корректна)"""
        from model.validation import validate
        return validate(self)

    # ==================== СРАВНЕНИЕ ====================

    def _key(self) -> tuple:
        return (
            self.labels.items,
            self.runnables.items,
            self.tasks.items,
            self.stimuli.items,
            self.core_types.items,
            self.quartzes.items,
            self.cores.items,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, AmaltheaModel):
            return NotImplemented
        return self._key() == other._key()

    __hash__ = None

    def __repr__(self):
        return (
            f"<AmaltheaModel labels={len(self.labels)} runnables={len(self.runnables)} "
            f"tasks={len(self.tasks)} stimuli={len(self.stimuli)} cores={len(self.cores)}>"
        )


def hyperperiod(model: AmaltheaModel) -> int:
    return model.hyperperiod()


def execution_time(model: AmaltheaModel, runnable: Runnable, core: Core, bound: ExecutionBound) -> int:
    return model.execution_time(runnable, core, bound)
