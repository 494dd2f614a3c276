# services/amalthea_xml.py - Чтение и запись модели AMALTHEA в XML-диалекте
# Разбор в два прохода: объявление сущностей, затем разрешение ссылок

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from lxml import etree

from model.models import (
    Core,
    CoreType,
    InterProcessStimulus,
    Label,
    PatternStimulus,
    PeriodicStimulus,
    Quartz,
    Runnable,
    SingleStimulus,
    SporadicStimulus,
    Stimulus,
    Task,
)
from model.system import AmaltheaModel
from model.validation import ModelValidationError

logger = logging.getLogger(__name__)

_INTEGER = re.compile(r"^[+-]?\d+$")

# Раздел → допустимые элементы
_SECTIONS = {
    "swModel": ("label", "runnable", "task"),
    "stimuliModel": ("stimulus",),
    "hwModel": ("coreType", "quartz", "core"),
}

# Элемент → (обязательные атрибуты, необязательные атрибуты)
_ATTRIBUTES = {
    "label": (("id", "name", "bitLength"), ()),
    "runnable": (("id", "name", "sizeBits", "bcet", "wcet"), ()),
    "read": (("label",), ()),
    "write": (("label",), ()),
    "task": (("id", "name", "priority", "stimulus"), ()),
    "call": (("runnable",), ()),
    "coreType": (("id", "ticksPerInstruction"), ()),
    "quartz": (("id", "frequencyHz"), ()),
    "core": (("id", "name", "coreType", "quartz", "x", "y"), ("active",)),
}

# Тип стимула → (обязательные, необязательные) сверх id и type
_STIMULUS_ATTRIBUTES = {
    "periodic": (("period",), ("offset",)),
    "sporadic": (("minInterArrival",), ()),
    "single": (("time",), ()),
    "pattern": (("times",), ()),
    "interProcess": (("label",), ("injectionPeriod",)),
}

_CHILDREN = {
    "runnable": ("read", "write"),
    "task": ("call",),
}


class ParseErrorKind(Enum):
    SYNTAX = "Syntax"
    UNKNOWN_ELEMENT = "UnknownElement"
    MISSING_ATTRIBUTE = "MissingAttribute"
    BAD_REFERENCE = "BadReference"
    BAD_NUMBER = "BadNumber"
    INVALID = "Invalid"


@dataclass(frozen=True)
class ParseError:
    """Ошибка разбора с позицией в исходном документе (строки и столбцы с 1)"""
    line: int
    column: int
    kind: ParseErrorKind
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.kind.value}: {self.message}"


class AmaltheaParseError(Exception):
    """Документ не разобран; errors содержит все ошибки прохода"""

    def __init__(self, errors: Sequence[ParseError]):
        self.errors = list(errors)
        first = str(self.errors[0]) if self.errors else "нет подробностей"
        super().__init__(f"Ошибок разбора: {len(self.errors)}; первая: {first}")


class _Parser:
    """Состояние одного разбора: исходные строки, найденные ошибки, позиции сущностей"""

    def __init__(self, document: bytes):
        self.lines = document.decode("utf-8", errors="replace").splitlines() or [""]
        self.errors: List[ParseError] = []
        self.positions: Dict[str, Tuple[int, int]] = {}
        self._references: List[Tuple[str, str, object]] = []  # (вид, id, элемент) для второго прохода

    # ==================== ПОЗИЦИИ И ОШИБКИ ====================

    def clamp(self, line: Optional[int], column: Optional[int]) -> Tuple[int, int]:
        line = min(max(line or 1, 1), len(self.lines))
        column = min(max(column or 1, 1), len(self.lines[line - 1]) + 1)
        return line, column

    def position(self, element) -> Tuple[int, int]:
        line = element.sourceline or 1
        column = 1
        if 1 <= line <= len(self.lines):
            found = self.lines[line - 1].find(f"<{element.tag}")
            if found >= 0:
                column = found + 1
        return self.clamp(line, column)

    def error(self, element, kind: ParseErrorKind, message: str) -> None:
        line, column = self.position(element)
        self.errors.append(ParseError(line, column, kind, message))

    # ==================== ПЕРВЫЙ ПРОХОД ====================

    def check_attributes(self, element, required: Sequence[str], optional: Sequence[str]) -> bool:
        """Проверяет набор атрибутов; False, если не хватает обязательных"""
        complete = True
        for name in required:
            if element.get(name) is None:
                self.error(element, ParseErrorKind.MISSING_ATTRIBUTE,
                           f"<{element.tag}>: нет атрибута {name!r}")
                complete = False
        allowed = set(required) | set(optional)
        for name in element.attrib:
            if name in allowed:
                continue
            if name.startswith("{"):
                logger.warning(f"Атрибут {name} элемента <{element.tag}> (строка {element.sourceline}) пропущен")
            else:
                self.error(element, ParseErrorKind.UNKNOWN_ELEMENT,
                           f"<{element.tag}>: неизвестный атрибут {name!r}")
        return complete

    def integer(self, element, name: str, default: Optional[int] = None) -> Optional[int]:
        value = element.get(name)
        if value is None:
            return default
        if not _INTEGER.match(value.strip()):
            self.error(element, ParseErrorKind.BAD_NUMBER,
                       f"<{element.tag} {name}={value!r}>: ожидалось целое число")
            return None
        return int(value)

    def boolean(self, element, name: str, default: bool) -> Optional[bool]:
        value = element.get(name)
        if value is None:
            return default
        if value.strip() not in ("true", "false"):
            self.error(element, ParseErrorKind.BAD_NUMBER,
                       f"<{element.tag} {name}={value!r}>: ожидалось true или false")
            return None
        return value.strip() == "true"

    def children(self, element) -> list:
        """Дочерние элементы без комментариев и инструкций обработки"""
        result = []
        allowed = _CHILDREN.get(element.tag, ())
        for child in element:
            if not isinstance(child.tag, str):
                continue
            if child.tag not in allowed:
                self.error(child, ParseErrorKind.UNKNOWN_ELEMENT,
                           f"неизвестный элемент <{child.tag}> внутри <{element.tag}>")
                continue
            result.append(child)
        return result

    def remember(self, entity_id: str, element) -> None:
        self.positions[entity_id] = self.position(element)

    def declare(self, root) -> Dict[str, list]:
        """Собирает элементы сущностей по видам"""
        declared: Dict[str, list] = {tag: [] for tags in _SECTIONS.values() for tag in tags}
        if root.tag != "amalthea":
            self.error(root, ParseErrorKind.UNKNOWN_ELEMENT, f"корневой элемент <{root.tag}>, ожидался <amalthea>")
            return declared
        self.check_attributes(root, (), ())
        for section in root:
            if not isinstance(section.tag, str):
                continue
            if section.tag not in _SECTIONS:
                self.error(section, ParseErrorKind.UNKNOWN_ELEMENT, f"неизвестный раздел <{section.tag}>")
                continue
            self.check_attributes(section, (), ())
            for element in section:
                if not isinstance(element.tag, str):
                    continue
                if element.tag not in _SECTIONS[section.tag]:
                    self.error(element, ParseErrorKind.UNKNOWN_ELEMENT,
                               f"неизвестный элемент <{element.tag}> в <{section.tag}>")
                    continue
                if element.tag not in _CHILDREN:
                    self.children(element)  # у листовых элементов детей нет
                declared[element.tag].append(element)
        return declared

    def read_label(self, element) -> Optional[Label]:
        if not self.check_attributes(element, *_ATTRIBUTES["label"]):
            return None
        bits = self.integer(element, "bitLength")
        if bits is None:
            return None
        self.remember(element.get("id"), element)
        return Label(id=element.get("id"), name=element.get("name"), bit_length=bits)

    def read_runnable(self, element) -> Optional[Runnable]:
        complete = self.check_attributes(element, *_ATTRIBUTES["runnable"])
        reads, writes = [], []
        for child in self.children(element):
            if self.check_attributes(child, *_ATTRIBUTES[child.tag]):
                (reads if child.tag == "read" else writes).append((child.get("label"), child))
        if not complete:
            return None
        numbers = [self.integer(element, name) for name in ("sizeBits", "bcet", "wcet")]
        if None in numbers:
            return None
        self.remember(element.get("id"), element)
        self._references.extend(("label", ref, child) for ref, child in reads + writes)
        return Runnable(
            id=element.get("id"),
            name=element.get("name"),
            size_bits=numbers[0],
            reads=tuple(ref for ref, _ in reads),
            writes=tuple(ref for ref, _ in writes),
            bcet_instructions=numbers[1],
            wcet_instructions=numbers[2],
        )

    def read_task(self, element) -> Optional[Task]:
        complete = self.check_attributes(element, *_ATTRIBUTES["task"])
        calls = [
            (child.get("runnable"), child)
            for child in self.children(element)
            if self.check_attributes(child, *_ATTRIBUTES["call"])
        ]
        if not complete:
            return None
        priority = self.integer(element, "priority")
        if priority is None:
            return None
        self.remember(element.get("id"), element)
        self._references.append(("stimulus", element.get("stimulus"), element))
        self._references.extend(("runnable", ref, child) for ref, child in calls)
        return Task(
            id=element.get("id"),
            name=element.get("name"),
            priority=priority,
            stimulus=element.get("stimulus"),
            runnables=tuple(ref for ref, _ in calls),
        )

    def read_stimulus(self, element) -> Optional[Stimulus]:
        kind = element.get("type")
        if kind is not None and kind not in _STIMULUS_ATTRIBUTES:
            self.error(element, ParseErrorKind.UNKNOWN_ELEMENT, f"неизвестный тип стимула {kind!r}")
            return None
        required, optional = _STIMULUS_ATTRIBUTES.get(kind, ((), ()))
        if not self.check_attributes(element, ("id", "type") + required, optional):
            return None

        stimulus_id = element.get("id")
        stimulus = None
        if kind == "periodic":
            period = self.integer(element, "period")
            offset = self.integer(element, "offset", default=0)
            if period is not None and offset is not None:
                stimulus = PeriodicStimulus(id=stimulus_id, period_us=period, offset_us=offset)
        elif kind == "sporadic":
            gap = self.integer(element, "minInterArrival")
            if gap is not None:
                stimulus = SporadicStimulus(id=stimulus_id, min_inter_arrival_us=gap)
        elif kind == "single":
            time = self.integer(element, "time")
            if time is not None:
                stimulus = SingleStimulus(id=stimulus_id, time_us=time)
        elif kind == "pattern":
            raw = element.get("times").split()
            if all(_INTEGER.match(value) for value in raw):
                stimulus = PatternStimulus(id=stimulus_id, times_us=tuple(int(value) for value in raw))
            else:
                self.error(element, ParseErrorKind.BAD_NUMBER,
                           f"<stimulus times={element.get('times')!r}>: ожидались целые числа")
        else:
            injection = element.get("injectionPeriod")
            period = self.integer(element, "injectionPeriod")
            if injection is None or period is not None:
                self._references.append(("label", element.get("label"), element))
                stimulus = InterProcessStimulus(
                    id=stimulus_id,
                    trigger_label=element.get("label"),
                    injection_period_us=period,
                )

        if stimulus is not None:
            self.remember(stimulus_id, element)
        return stimulus

    def read_core_type(self, element) -> Optional[CoreType]:
        if not self.check_attributes(element, *_ATTRIBUTES["coreType"]):
            return None
        ticks = self.integer(element, "ticksPerInstruction")
        if ticks is None:
            return None
        self.remember(element.get("id"), element)
        return CoreType(id=element.get("id"), ticks_per_instruction=ticks)

    def read_quartz(self, element) -> Optional[Quartz]:
        if not self.check_attributes(element, *_ATTRIBUTES["quartz"]):
            return None
        frequency = self.integer(element, "frequencyHz")
        if frequency is None:
            return None
        self.remember(element.get("id"), element)
        return Quartz(id=element.get("id"), frequency_hz=frequency)

    def read_core(self, element) -> Optional[Core]:
        if not self.check_attributes(element, *_ATTRIBUTES["core"]):
            return None
        x, y = self.integer(element, "x"), self.integer(element, "y")
        active = self.boolean(element, "active", default=True)
        if x is None or y is None or active is None:
            return None
        self.remember(element.get("id"), element)
        self._references.append(("coreType", element.get("coreType"), element))
        self._references.append(("quartz", element.get("quartz"), element))
        return Core(
            id=element.get("id"),
            name=element.get("name"),
            core_type=element.get("coreType"),
            quartz=element.get("quartz"),
            x=x,
            y=y,
            active=active,
        )

    # ==================== РАЗБОР ====================

    def run(self, root) -> AmaltheaModel:
        declared = self.declare(root)

        entities = {
            "label": [self.read_label(e) for e in declared["label"]],
            "runnable": [self.read_runnable(e) for e in declared["runnable"]],
            "task": [self.read_task(e) for e in declared["task"]],
            "stimulus": [self.read_stimulus(e) for e in declared["stimulus"]],
            "coreType": [self.read_core_type(e) for e in declared["coreType"]],
            "quartz": [self.read_quartz(e) for e in declared["quartz"]],
            "core": [self.read_core(e) for e in declared["core"]],
        }
        if self.errors:
            raise AmaltheaParseError(self.errors)

        # Второй проход: ссылки разрешаются по всем объявлениям, порядок в документе не важен
        known = {kind: {item.id for item in items} for kind, items in entities.items()}
        for kind, reference, element in self._references:
            if reference not in known[kind]:
                self.error(element, ParseErrorKind.BAD_REFERENCE,
                           f"<{element.tag}> ссылается на необъявленный {kind} {reference!r}")
        if self.errors:
            raise AmaltheaParseError(self.errors)

        model = AmaltheaModel(
            labels=entities["label"],
            runnables=entities["runnable"],
            tasks=entities["task"],
            stimuli=entities["stimulus"],
            core_types=entities["coreType"],
            quartzes=entities["quartz"],
            cores=entities["core"],
        )

        for violation in model.validate():
            line, column = self.positions.get(violation.entity) or self.position(root)
            self.errors.append(ParseError(line, column, ParseErrorKind.INVALID, str(violation)))
        if self.errors:
            raise AmaltheaParseError(self.errors)
        return model


def parse(document: Union[bytes, str]) -> AmaltheaModel:
    """
    Разбирает документ XML-диалекта AMALTHEA.

    Args:
        document: Содержимое документа (UTF-8)

    Returns:
        Модель, прошедшая проверку validate

    Raises:
        AmaltheaParseError: Все ошибки первого неуспешного прохода
    """
    if isinstance(document, str):
        document = document.encode("utf-8")
    parser = _Parser(document)

    if not document.strip():
        raise AmaltheaParseError([ParseError(1, 1, ParseErrorKind.SYNTAX, "пустой документ")])

    xml_parser = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=False)
    try:
        root = etree.fromstring(document, parser=xml_parser)
    except etree.XMLSyntaxError as e:
        line, column = e.position if e.position else (1, 1)
        line, column = parser.clamp(line, column)
        raise AmaltheaParseError([ParseError(line, column, ParseErrorKind.SYNTAX, e.msg or str(e))]) from e

    model = parser.run(root)
    logger.debug(f"Модель разобрана: {model!r}")
    return model


def _element(parent, tag: str, attributes: Sequence[Tuple[str, object]]):
    element = etree.SubElement(parent, tag)
    for name, value in attributes:
        element.set(name, str(value))
    return element


def _stimulus_attributes(stimulus: Stimulus) -> List[Tuple[str, object]]:
    if isinstance(stimulus, PeriodicStimulus):
        return [("type", "periodic"), ("period", stimulus.period_us), ("offset", stimulus.offset_us)]
    if isinstance(stimulus, SporadicStimulus):
        return [("type", "sporadic"), ("minInterArrival", stimulus.min_inter_arrival_us)]
    if isinstance(stimulus, SingleStimulus):
        return [("type", "single"), ("time", stimulus.time_us)]
    if isinstance(stimulus, PatternStimulus):
        return [("type", "pattern"), ("times", " ".join(str(t) for t in stimulus.times_us))]
    attributes = [("type", "interProcess"), ("label", stimulus.trigger_label)]
    if stimulus.injection_period_us is not None:
        attributes.append(("injectionPeriod", stimulus.injection_period_us))
    return attributes


def serialize(model: AmaltheaModel) -> bytes:
    """
    Записывает модель в XML-диалект: порядок элементов - порядок модели.

    Raises:
        ModelValidationError: Модель не проходит проверку
    """
    violations = model.validate()
    if violations:
        raise ModelValidationError(violations)

    root = etree.Element("amalthea")

    sw = etree.SubElement(root, "swModel")
    for label in model.labels:
        _element(sw, "label", [("id", label.id), ("name", label.name), ("bitLength", label.bit_length)])
    for runnable in model.runnables:
        element = _element(sw, "runnable", [
            ("id", runnable.id),
            ("name", runnable.name),
            ("sizeBits", runnable.size_bits),
            ("bcet", runnable.bcet_instructions),
            ("wcet", runnable.wcet_instructions),
        ])
        for label_id in runnable.reads:
            _element(element, "read", [("label", label_id)])
        for label_id in runnable.writes:
            _element(element, "write", [("label", label_id)])
    for task in model.tasks:
        element = _element(sw, "task", [
            ("id", task.id),
            ("name", task.name),
            ("priority", task.priority),
            ("stimulus", task.stimulus),
        ])
        for runnable_id in task.runnables:
            _element(element, "call", [("runnable", runnable_id)])

    stimuli = etree.SubElement(root, "stimuliModel")
    for stimulus in model.stimuli:
        _element(stimuli, "stimulus", [("id", stimulus.id)] + _stimulus_attributes(stimulus))

    hw = etree.SubElement(root, "hwModel")
    for core_type in model.core_types:
        _element(hw, "coreType", [("id", core_type.id), ("ticksPerInstruction", core_type.ticks_per_instruction)])
    for quartz in model.quartzes:
        _element(hw, "quartz", [("id", quartz.id), ("frequencyHz", quartz.frequency_hz)])
    for core in model.cores:
        _element(hw, "core", [
            ("id", core.id),
            ("name", core.name),
            ("coreType", core.core_type),
            ("quartz", core.quartz),
            ("x", core.x),
            ("y", core.y),
            ("active", "true" if core.active else "false"),
        ])

    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="UTF-8")


def parse_file(path: Union[str, Path]) -> AmaltheaModel:
    with open(path, "rb") as f:
        model = parse(f.read())
    logger.info(f"✅ Модель загружена из {path}: {model!r}")
    return model


def write_file(model: AmaltheaModel, path: Union[str, Path]) -> None:
    data = serialize(model)
    with open(path, "wb") as f:
        f.write(data)
    logger.info(f"Модель записана в {path} ({len(data)} байт)")
