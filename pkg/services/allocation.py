# services/allocation.py - Размещение runnable и меток по ядрам
# Проверка полноты и JSON-формат {"runnables": {имя: ядро}, "labels": {имя: ядро}}

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Union

from model.system import AmaltheaModel
from services.noc import NocPlatform

logger = logging.getLogger(__name__)


class AllocationError(Exception):
    """Неполное размещение или ссылка на неактивное/неизвестное ядро"""


@dataclass(frozen=True)
class Allocation:
    """Полное отображение runnable → ядро и метка → ядро (по id)"""
    runnable_core: Mapping[str, str]
    label_core: Mapping[str, str]

    def core_of_runnable(self, runnable_id: str) -> str:
        return self.runnable_core[runnable_id]

    def core_of_label(self, label_id: str) -> str:
        return self.label_core[label_id]


def all_on_core(model: AmaltheaModel, core_id: str) -> Allocation:
    """Всё на одном ядре"""
    return Allocation(
        runnable_core={runnable.id: core_id for runnable in model.runnables},
        label_core={label.id: core_id for label in model.labels},
    )


def check_allocation(allocation: Allocation, model: AmaltheaModel, platform: NocPlatform) -> None:
    """
    Проверяет, что размещение полное и использует только активные ядра платформы.

    Raises:
        AllocationError: Первое найденное нарушение
    """
    active = {core.id for core in platform.active_cores}
    known = {core.id for core in platform.cores}

    for kind, registry, mapping in (
        ("runnable", model.runnables, allocation.runnable_core),
        ("label", model.labels, allocation.label_core),
    ):
        for entity in registry:
            core_id = mapping.get(entity.id)
            if core_id is None:
                raise AllocationError(f"{kind} {entity.name} не размещён")
            if core_id not in known:
                raise AllocationError(f"{kind} {entity.name} размещён на неизвестном ядре {core_id!r}")
            if core_id not in active:
                raise AllocationError(f"{kind} {entity.name} размещён на неактивном ядре {core_id!r}")


def allocation_to_dict(allocation: Allocation, model: AmaltheaModel) -> Dict[str, Dict[str, str]]:
    """Имена сущностей → имена ядер, в порядке модели"""
    def core_name(core_id: str) -> str:
        core = model.get_core_by_id(core_id)
        return core.name if core else core_id

    return {
        "runnables": {
            runnable.name: core_name(allocation.runnable_core[runnable.id])
            for runnable in model.runnables
        },
        "labels": {
            label.name: core_name(allocation.label_core[label.id])
            for label in model.labels
        },
    }


def allocation_from_dict(data: Mapping, model: AmaltheaModel) -> Allocation:
    """
    Строит размещение из словаря с именами сущностей и ядер.

    Raises:
        AllocationError: Неизвестное имя сущности или ядра
    """
    if not isinstance(data, Mapping) or "runnables" not in data or "labels" not in data:
        raise AllocationError('Ожидался объект с ключами "runnables" и "labels"')

    def resolve_core(name: str) -> str:
        core = model.get_core_by_name(name)
        if core is None:
            raise AllocationError(f"Неизвестное ядро {name!r}")
        return core.id

    runnable_core = {}
    for name, core_name in data["runnables"].items():
        runnable = model.get_runnable_by_name(name)
        if runnable is None:
            raise AllocationError(f"Неизвестный runnable {name!r}")
        runnable_core[runnable.id] = resolve_core(core_name)

    label_core = {}
    for name, core_name in data["labels"].items():
        label = model.get_label_by_name(name)
        if label is None:
            raise AllocationError(f"Неизвестная метка {name!r}")
        label_core[label.id] = resolve_core(core_name)

    return Allocation(runnable_core=runnable_core, label_core=label_core)


def load_allocation(path: Union[str, Path], model: AmaltheaModel) -> Allocation:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise AllocationError(f"Некорректный JSON размещения: {e}") from e
    return allocation_from_dict(data, model)


def save_allocation(allocation: Allocation, model: AmaltheaModel, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(allocation_to_dict(allocation, model), f, indent=2)
        f.write("\n")
    logger.info(f"Размещение сохранено в {path}")
