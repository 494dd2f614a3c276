# services/democar.py - Генерация бенчмарка DemoCar
# Задачи, runnable и метки упрощённого блока управления двигателем

import logging
from typing import List, Optional, Tuple

import config
from model.models import (
    Core,
    CoreType,
    InterProcessStimulus,
    Label,
    PeriodicStimulus,
    Quartz,
    Runnable,
    Task,
)
from model.system import AmaltheaModel

logger = logging.getLogger(__name__)

DEMOCAR_CORE_TYPE_ID = "DemoCarCoreType?type=CoreType"
DEMOCAR_QUARTZ_ID = "DemoCarQuartz?type=Quartz"

# Метки и их длины в битах
LABELS: List[Tuple[str, int]] = [
    ("AcceleratorPedalPosition1", 16),
    ("AcceleratorPedalPosition2", 16),
    ("AcceleratorPedalPositions", 16),
    ("AFRFeedbackFlag", 1),
    ("BaseFuelMassPerStroke", 16),
    ("BatteryVoltage", 16),
    ("BatVoltCorr", 16),
    ("CoolantTemperature", 8),
    ("CrankFlag", 1),
    ("CylinderNumber", 8),
    ("DesiredThrottlePos", 16),
    ("DesiredThrottlePosOut", 16),
    ("EngineSpeed", 16),
    ("FuelEnabled", 1),
    ("IdleFlag", 1),
    ("IdleIgnitionCorrection", 8),
    ("IdleOLFlag", 1),
    ("IdleSpeedSetpoint", 16),
    ("IdleThrottleCorrection", 16),
    ("IgnitionOn", 1),
    ("IgnitionTime1", 16),
    ("IgnitionTime2", 16),
    ("IgnitionTime3", 16),
    ("IgnitionTime4", 16),
    ("IgnitionTime5", 16),
    ("IgnitionTime6", 16),
    ("IgnitionTime7", 16),
    ("IgnitionTime8", 16),
    ("IgnitionTiming", 8),
    ("InjTimeCyl1", 16),
    ("InjTimeCyl2", 16),
    ("InjTimeCyl3", 16),
    ("InjTimeCyl4", 16),
    ("InjTimeCyl5", 16),
    ("InjTimeCyl6", 16),
    ("InjTimeCyl7", 16),
    ("InjTimeCyl8", 16),
    ("InletAirTemperature", 8),
    ("LambdaCat1", 16),
    ("LambdaCat2", 16),
    ("MafRateOut", 16),
    ("MAFSensor", 16),
    ("MAFSensorVoltage", 8),
    ("OverrunFlag", 1),
    ("OverrunFuelShutoffFlag", 1),
    ("OverrunIgnitionRetard", 8),
    ("PedalAngle1", 16),
    ("PedalAngle2", 16),
    ("PowerUpComplete", 1),
    ("RateOfThrottleChange", 16),
    ("ThrottleAngle1", 16),
    ("ThrottleAngle2", 16),
    ("ThrottleImpulseBeta1", 16),
    ("ThrottleImpulseBeta2", 16),
    ("ThrottlePosition1", 16),
    ("ThrottlePosition2", 16),
    ("TotalFuelMassPerStroke", 16),
    ("TransientFuelMassPerStroke", 16),
    ("TriggeredCylinderNumber", 8),
    ("UpdatePeriod", 16),
    ("VehicleSpeed", 16),
    ("VotedPedalPosition", 16),
]

_IGNITION_TIMES = [f"IgnitionTime{i}" for i in range(1, 9)]
_INJECTION_TIMES = [f"InjTimeCyl{i}" for i in range(1, 9)]

# (задача, runnable, размер в битах, читаемые метки, записываемые метки, BCET, WCET)
RUNNABLES: List[Tuple[str, str, int, List[str], List[str], int, int]] = [
    ("CylNumTriggeredTask", "CylNumObserverEntity", 55600,
     ["CylinderNumber"], ["TriggeredCylinderNumber"], 434, 1145),
    ("ActuatorTask", "IgnitionSWCSyncEntity", 72512,
     ["IgnitionTiming", "EngineSpeed", "TriggeredCylinderNumber"], _IGNITION_TIMES, 2728, 4921),
    ("ActuatorTask", "InjectionSWCSync", 69824,
     ["TotalFuelMassPerStroke", "CrankFlag", "TriggeredCylinderNumber", "EngineSpeed", "BatVoltCorr"],
     _INJECTION_TIMES, 1644, 3302),
    ("Task5ms", "MassAirFlowSWCEntity", 56608,
     ["MAFSensorVoltage"], ["MAFSensor"], 55, 172),
    ("Task5ms", "ThrottleSensSWCEntity", 58816,
     ["ThrottleAngle1", "ThrottleAngle2"], ["ThrottlePosition1", "ThrottlePosition2"], 113, 337),
    ("Task5ms", "APedSensor", 66288,
     ["PedalAngle1", "PedalAngle2"], ["AcceleratorPedalPosition1", "AcceleratorPedalPosition2"], 555, 964),
    ("Task10ms", "APedVoterSWCEntity", 56832,
     ["AcceleratorPedalPosition1", "AcceleratorPedalPosition2"], ["VotedPedalPosition"], 87, 287),
    ("Task10ms", "ThrottleCtrlEntity", 70944,
     ["CoolantTemperature", "EngineSpeed", "MAFSensor", "ThrottlePosition1", "ThrottlePosition2"],
     ["BaseFuelMassPerStroke", "MafRateOut"], 3664, 5783),
    ("Task10ms", "ThrottleActuatorEntity", 128464,
     ["CoolantTemperature", "CrankFlag", "DesiredThrottlePosOut", "EngineSpeed", "FuelEnabled",
      "InletAirTemperature", "OverrunFlag", "UpdatePeriod"],
     ["RateOfThrottleChange", "ThrottleImpulseBeta1", "ThrottleImpulseBeta2"], 3788, 5913),
    ("Task10ms", "BaseFuelMassEntity", 70944,
     ["CoolantTemperature", "EngineSpeed", "MAFSensor", "ThrottlePosition1", "ThrottlePosition2"],
     ["BaseFuelMassPerStroke", "MafRateOut"], 3664, 5783),
    ("Task10ms", "ThrottleChangeSWCEntity", 128464,
     ["CoolantTemperature", "CrankFlag", "DesiredThrottlePosOut", "EngineSpeed", "FuelEnabled",
      "InletAirTemperature", "OverrunFlag", "UpdatePeriod"],
     ["RateOfThrottleChange", "ThrottleImpulseBeta1", "ThrottleImpulseBeta2"], 3788, 5913),
    ("Task10ms", "TransFuelMassSWCEntity", 128464,
     ["InletAirTemperature", "CoolantTemperature", "MafRateOut", "EngineSpeed", "UpdatePeriod",
      "RateOfThrottleChange", "ThrottleImpulseBeta1", "ThrottleImpulseBeta2", "OverrunFuelShutoffFlag",
      "CrankFlag", "FuelEnabled", "BaseFuelMassPerStroke"],
     ["TransientFuelMassPerStroke"], 3985, 6376),
    ("Task10ms", "IgnitionSWCEntity", 66784,
     ["CrankFlag", "MafRateOut", "EngineSpeed", "InletAirTemperature", "OverrunIgnitionRetard",
      "IdleFlag", "IdleOLFlag", "IdleIgnitionCorrection", "CoolantTemperature"],
     ["IgnitionTiming"], 3047, 4537),
    ("Task10ms", "TotalFuelMassSWCEntity", 66432,
     ["CrankFlag", "LambdaCat1", "LambdaCat2", "CoolantTemperature", "OverrunFuelShutoffFlag",
      "TransientFuelMassPerStroke"],
     ["TotalFuelMassPerStroke"], 743, 1354),
    ("Task20ms", "OperatingModeSWCEntity", 139392,
     ["EngineSpeed", "VehicleSpeed", "IgnitionOn", "PowerUpComplete", "VotedPedalPosition",
      "IdleSpeedSetpoint"],
     ["OverrunFuelShutoffFlag", "IdleFlag", "IdleOLFlag", "CrankFlag", "OverrunFlag", "FuelEnabled",
      "AFRFeedbackFlag", "OverrunIgnitionRetard", "UpdatePeriod"], 18612, 39281),
    ("Task20ms", "IdleSpeedCtrlSWCEntity", 66976,
     ["IdleFlag", "EngineSpeed", "CoolantTemperature"],
     ["IdleSpeedSetpoint", "IdleThrottleCorrection", "IdleIgnitionCorrection"], 913, 1686),
    ("Task100ms", "APedSensorDiag", 66288,
     ["PedalAngle1", "PedalAngle2"], [], 102, 235),
    ("Task100ms", "InjBattVoltCorrSWC", 56928,
     ["BatteryVoltage"], ["BatVoltCorr"], 290, 547),
]

# (задача, приоритет, период в мкс или None для апериодических)
TASKS: List[Tuple[str, int, Optional[int]]] = [
    ("CylNumTriggeredTask", 30, None),
    ("ActuatorTask", 25, None),
    ("Task5ms", 20, 5000),
    ("Task10ms", 15, 10000),
    ("Task20ms", 10, 20000),
    ("Task100ms", 5, 100000),
]

# Апериодические задачи: метка, запись которой активирует задачу
TRIGGERS = {
    "CylNumTriggeredTask": "CylinderNumber",
    "ActuatorTask": "TriggeredCylinderNumber",
}


def label_id(name: str) -> str:
    return f"{name}?type=Label"


def runnable_id(name: str) -> str:
    return f"{name}?type=Runnable"


def task_id(name: str) -> str:
    return f"{name}?type=Task"


def stimulus_id(task_name: str) -> str:
    return f"Stimulus_{task_name}?type=Stimulus"


def core_id(index: int) -> str:
    return f"Core{index}?type=Core"


def build_democar_platform(width: int, height: int, active: int) -> List[Core]:
    """
    Ядра сетки width x height в порядке строк; первые active ядер включены.

    Все ядра ссылаются на общий тип ядра и общий кварц DemoCar.

    Args:
        width: Ширина сетки
        height: Высота сетки
        active: Число включённых ядер

    Returns:
        Список ядер в порядке (0,0), (1,0), ..., (w-1,h-1)

    Raises:
        ValueError: Размеры или число активных ядер вне допустимых границ
    """
    if width < 1 or height < 1:
        raise ValueError(f"Некорректный размер сетки {width}x{height}")
    if not 1 <= active <= width * height:
        raise ValueError(f"Число активных ядер {active} вне диапазона [1, {width * height}]")

    cores = []
    for y in range(height):
        for x in range(width):
            index = y * width + x
            cores.append(Core(
                id=core_id(index),
                name=f"Core{index}",
                core_type=DEMOCAR_CORE_TYPE_ID,
                quartz=DEMOCAR_QUARTZ_ID,
                x=x,
                y=y,
                active=index < active,
            ))
    return cores


def democar_hardware(
    width: int = 2,
    height: int = 2,
    active: Optional[int] = None,
    frequency_hz: int = config.DEMOCAR_FREQUENCY_HZ,
    ticks_per_instruction: int = config.DEMOCAR_TICKS_PER_INSTRUCTION,
) -> Tuple[List[CoreType], List[Quartz], List[Core]]:
    """Типы ядер, кварцы и ядра платформы DemoCar"""
    if active is None:
        active = width * height
    core_types = [CoreType(id=DEMOCAR_CORE_TYPE_ID, ticks_per_instruction=ticks_per_instruction)]
    quartzes = [Quartz(id=DEMOCAR_QUARTZ_ID, frequency_hz=frequency_hz)]
    return core_types, quartzes, build_democar_platform(width, height, active)


def build_democar(
    injection_period_us: Optional[int] = config.CYLNUM_INJECTION_PERIOD_US,
    frequency_hz: int = config.DEMOCAR_FREQUENCY_HZ,
    ticks_per_instruction: int = config.DEMOCAR_TICKS_PER_INSTRUCTION,
) -> AmaltheaModel:
    """
    Собирает полную модель DemoCar на платформе 2x2 со всеми включёнными ядрами.

    CylNumTriggeredTask активируется записью CylinderNumber; так как её не пишет
    ни один runnable, задача дополнительно получает внешние события коленвала
    с периодом injection_period_us (None - без внешних событий).
    ActuatorTask активируется записью TriggeredCylinderNumber.

    Args:
        injection_period_us: Период внешних событий для CylNumTriggeredTask
        frequency_hz: Частота кварца
        ticks_per_instruction: Тактов на инструкцию

    Returns:
        Модель, проходящая validate() без нарушений
    """
    labels = [Label(id=label_id(name), name=name, bit_length=bits) for name, bits in LABELS]

    runnables = [
        Runnable(
            id=runnable_id(name),
            name=name,
            size_bits=size,
            reads=tuple(label_id(label) for label in reads),
            writes=tuple(label_id(label) for label in writes),
            bcet_instructions=bcet,
            wcet_instructions=wcet,
        )
        for _, name, size, reads, writes, bcet, wcet in RUNNABLES
    ]

    stimuli = []
    tasks = []
    for task_name, priority, period_us in TASKS:
        if period_us is not None:
            stimuli.append(PeriodicStimulus(id=stimulus_id(task_name), period_us=period_us, offset_us=0))
        else:
            injection = injection_period_us if task_name == "CylNumTriggeredTask" else None
            stimuli.append(InterProcessStimulus(
                id=stimulus_id(task_name),
                trigger_label=label_id(TRIGGERS[task_name]),
                injection_period_us=injection,
            ))
        tasks.append(Task(
            id=task_id(task_name),
            name=task_name,
            priority=priority,
            stimulus=stimulus_id(task_name),
            runnables=tuple(runnable_id(name) for owner, name, *_ in RUNNABLES if owner == task_name),
        ))

    core_types, quartzes, cores = democar_hardware(
        frequency_hz=frequency_hz,
        ticks_per_instruction=ticks_per_instruction,
    )

    model = AmaltheaModel(
        labels=labels,
        runnables=runnables,
        tasks=tasks,
        stimuli=stimuli,
        core_types=core_types,
        quartzes=quartzes,
        cores=cores,
    )
    logger.debug(f"DemoCar собран: {model}")
    return model
