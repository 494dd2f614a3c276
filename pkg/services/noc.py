# services/noc.py - Сеть на кристалле: сетка W x H с XY-маршрутизацией
# Задержка сообщения без учёта конкуренции за каналы

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import config
from model.models import Core, CoreType, Quartz
from model.system import AmaltheaModel
from services.democar import DEMOCAR_QUARTZ_ID, build_democar_platform, democar_hardware

logger = logging.getLogger(__name__)

Coordinate = Tuple[int, int]


class NocError(Exception):
    """Некорректная платформа или координаты вне сетки"""


@dataclass(frozen=True)
class Route:
    """Путь от источника к приёмнику, включая оба конца"""
    path: Tuple[Coordinate, ...]

    @property
    def hops(self) -> int:
        return len(self.path) - 1


@dataclass(frozen=True)
class NocPlatform:
    """
    Сетка width x height: по одному ядру в каждом узле.

    Выключенные ядра не вычисляют, но их маршрутизаторы работают,
    иначе сетка 2x2 с XY-маршрутизацией распадалась бы.
    """
    width: int
    height: int
    cores: Tuple[Core, ...]
    hop_latency_ns: int = config.NOC_HOP_LATENCY_NS
    flit_bits: int = config.NOC_FLIT_BITS
    _by_position: Dict[Coordinate, Core] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cores", tuple(self.cores))
        if self.width < 1 or self.height < 1:
            raise NocError(f"Некорректный размер сетки {self.width}x{self.height}")
        if self.hop_latency_ns < 1 or self.flit_bits < 1:
            raise NocError("hop_latency_ns и flit_bits должны быть положительными")
        if len(self.cores) != self.width * self.height:
            raise NocError(f"Сетка {self.width}x{self.height} требует {self.width * self.height} ядер, "
                           f"получено {len(self.cores)}")

        by_position = {}
        for core in self.cores:
            if not self.in_bounds(core.position):
                raise NocError(f"Ядро {core.name} вне сетки: {core.position}")
            if core.position in by_position:
                raise NocError(f"Позиция {core.position} занята несколькими ядрами")
            by_position[core.position] = core
        if not any(core.active for core in self.cores):
            raise NocError("На платформе нет ни одного активного ядра")
        object.__setattr__(self, "_by_position", by_position)

    @classmethod
    def from_model(
        cls,
        model: AmaltheaModel,
        width: int,
        height: int,
        hop_latency_ns: int = config.NOC_HOP_LATENCY_NS,
        flit_bits: int = config.NOC_FLIT_BITS,
    ) -> "NocPlatform":
        return cls(width, height, tuple(model.cores), hop_latency_ns, flit_bits)

    @property
    def active_cores(self) -> List[Core]:
        """Активные ядра в порядке списка ядер"""
        return [core for core in self.cores if core.active]

    def in_bounds(self, position: Coordinate) -> bool:
        x, y = position
        return 0 <= x < self.width and 0 <= y < self.height

    def core_at(self, x: int, y: int) -> Core:
        self._check((x, y))
        return self._by_position[(x, y)]

    def _check(self, *positions: Coordinate) -> None:
        for position in positions:
            if not self.in_bounds(position):
                raise NocError(f"Координата {position} вне сетки {self.width}x{self.height}")

    def xy_route(self, src: Coordinate, dst: Coordinate) -> Route:
        """
        XY-маршрут: сначала полностью по X, затем по Y.

        Args:
            src: Координата источника
            dst: Координата приёмника

        Returns:
            Route длиной |dx| + |dy| переходов
        """
        self._check(src, dst)
        x, y = src
        path = [(x, y)]
        step = 1 if dst[0] > x else -1
        while x != dst[0]:
            x += step
            path.append((x, y))
        step = 1 if dst[1] > y else -1
        while y != dst[1]:
            y += step
            path.append((x, y))
        return Route(path=tuple(path))

    def hops(self, src: Coordinate, dst: Coordinate) -> int:
        self._check(src, dst)
        return abs(src[0] - dst[0]) + abs(src[1] - dst[1])

    def flits(self, bits: int) -> int:
        return -(-bits // self.flit_bits)

    def message_latency(self, bits: int, src: Coordinate, dst: Coordinate) -> int:
        """
        Задержка передачи сообщения, нс: переходы * задержка перехода * число флитов.

        Локальный доступ (src == dst) бесплатен.
        """
        if bits < 1:
            raise NocError(f"Размер сообщения должен быть положительным: {bits}")
        hops = self.hops(src, dst)
        if hops == 0:
            return 0
        return hops * self.hop_latency_ns * self.flits(bits)


def parse_mesh(value: str) -> Tuple[int, int]:
    """
    Разбирает размер сетки вида "2x2".

    Raises:
        ValueError: Строка не в формате WxH или размеры не положительны
    """
    parts = value.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"Ожидался размер сетки вида WxH, получено {value!r}")
    width, height = int(parts[0]), int(parts[1])
    if width < 1 or height < 1:
        raise ValueError(f"Размеры сетки должны быть положительными: {value!r}")
    return width, height


def platform_for_model(
    model: AmaltheaModel,
    width: int,
    height: int,
    active: Optional[int] = None,
    hop_latency_ns: int = config.NOC_HOP_LATENCY_NS,
    flit_bits: int = config.NOC_FLIT_BITS,
    frequency_hz: Optional[int] = None,
) -> Tuple[AmaltheaModel, NocPlatform]:
    """
    Приводит аппаратную часть модели к сетке width x height с active включёнными ядрами.

    Если ядра модели уже покрывают сетку, сохраняются их типы и кварцы,
    иначе строится платформа DemoCar. Включаются первые active ядер в порядке строк;
    при active=None флаги ядер модели не меняются (для новой платформы включены все).
    frequency_hz заменяет частоты всех кварцев.

    Returns:
        (модель с новой аппаратной частью, платформа)
    """
    positions = {core.position for core in model.cores}
    expected = {(x, y) for y in range(height) for x in range(width)}

    if positions == expected and len(model.cores) == width * height:
        if active is None:
            cores = list(model.cores)
        else:
            row_major = sorted(model.cores, key=lambda core: (core.y, core.x))
            if not 1 <= active <= len(row_major):
                raise ValueError(f"Число активных ядер {active} вне диапазона [1, {len(row_major)}]")
            rank = {core.id: i for i, core in enumerate(row_major)}
            cores = [
                Core(core.id, core.name, core.core_type, core.quartz, core.x, core.y, rank[core.id] < active)
                for core in model.cores
            ]
        core_types = list(model.core_types)
        quartzes = list(model.quartzes)
    else:
        logger.info(f"Ядра модели не образуют сетку {width}x{height}, строится платформа DemoCar")
        core_types, quartzes, _ = democar_hardware(width, height, active)
        if model.core_types.count():
            ticks = model.core_types.get(0).ticks_per_instruction
            core_types = [CoreType(id=core_types[0].id, ticks_per_instruction=ticks)]
        if model.quartzes.count():
            quartzes = [Quartz(id=DEMOCAR_QUARTZ_ID, frequency_hz=model.quartzes.get(0).frequency_hz)]
        cores = build_democar_platform(width, height, width * height if active is None else active)

    if frequency_hz is not None:
        quartzes = [Quartz(id=quartz.id, frequency_hz=frequency_hz) for quartz in quartzes]

    reshaped = model.with_hardware(core_types, quartzes, cores)
    platform = NocPlatform.from_model(reshaped, width, height, hop_latency_ns, flit_bits)
    logger.debug(f"Платформа {width}x{height}, активных ядер: {len(platform.active_cores)}")
    return reshaped, platform
