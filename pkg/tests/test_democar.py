# tests/test_democar.py - Модель DemoCar: задачи, runnable и метки бенчмарка

import pytest

from model import InterProcessStimulus, PeriodicStimulus
from services.democar import (
    build_democar,
    build_democar_platform,
    democar_hardware,
    label_id,
    runnable_id,
)

# (runnable, задача, размер, чтения, записи, BCET, WCET) в порядке строк таблицы бенчмарка
EXPECTED_RUNNABLES = [
    ("CylNumObserverEntity", "CylNumTriggeredTask", 55600,
     "CylinderNumber", "TriggeredCylinderNumber", 434, 1145),
    ("IgnitionSWCSyncEntity", "ActuatorTask", 72512,
     "IgnitionTiming, EngineSpeed, TriggeredCylinderNumber",
     "IgnitionTime1, IgnitionTime2, IgnitionTime3, IgnitionTime4, "
     "IgnitionTime5, IgnitionTime6, IgnitionTime7, IgnitionTime8", 2728, 4921),
    ("InjectionSWCSync", "ActuatorTask", 69824,
     "TotalFuelMassPerStroke, CrankFlag, TriggeredCylinderNumber, EngineSpeed, BatVoltCorr",
     "InjTimeCyl1, InjTimeCyl2, InjTimeCyl3, InjTimeCyl4, "
     "InjTimeCyl5, InjTimeCyl6, InjTimeCyl7, InjTimeCyl8", 1644, 3302),
    ("MassAirFlowSWCEntity", "Task5ms", 56608, "MAFSensorVoltage", "MAFSensor", 55, 172),
    ("ThrottleSensSWCEntity", "Task5ms", 58816,
     "ThrottleAngle1, ThrottleAngle2", "ThrottlePosition1, ThrottlePosition2", 113, 337),
    ("APedSensor", "Task5ms", 66288,
     "PedalAngle1, PedalAngle2", "AcceleratorPedalPosition1, AcceleratorPedalPosition2", 555, 964),
    ("APedVoterSWCEntity", "Task10ms", 56832,
     "AcceleratorPedalPosition1, AcceleratorPedalPosition2", "VotedPedalPosition", 87, 287),
    ("ThrottleCtrlEntity", "Task10ms", 70944,
     "CoolantTemperature, EngineSpeed, MAFSensor, ThrottlePosition1, ThrottlePosition2",
     "BaseFuelMassPerStroke, MafRateOut", 3664, 5783),
    ("ThrottleActuatorEntity", "Task10ms", 128464,
     "CoolantTemperature, CrankFlag, DesiredThrottlePosOut, EngineSpeed, FuelEnabled, "
     "InletAirTemperature, OverrunFlag, UpdatePeriod",
     "RateOfThrottleChange, ThrottleImpulseBeta1, ThrottleImpulseBeta2", 3788, 5913),
    ("BaseFuelMassEntity", "Task10ms", 70944,
     "CoolantTemperature, EngineSpeed, MAFSensor, ThrottlePosition1, ThrottlePosition2",
     "BaseFuelMassPerStroke, MafRateOut", 3664, 5783),
    ("ThrottleChangeSWCEntity", "Task10ms", 128464,
     "CoolantTemperature, CrankFlag, DesiredThrottlePosOut, EngineSpeed, FuelEnabled, "
     "InletAirTemperature, OverrunFlag, UpdatePeriod",
     "RateOfThrottleChange, ThrottleImpulseBeta1, ThrottleImpulseBeta2", 3788, 5913),
    ("TransFuelMassSWCEntity", "Task10ms", 128464,
     "InletAirTemperature, CoolantTemperature, MafRateOut, EngineSpeed, UpdatePeriod, "
     "RateOfThrottleChange, ThrottleImpulseBeta1, ThrottleImpulseBeta2, OverrunFuelShutoffFlag, "
     "CrankFlag, FuelEnabled, BaseFuelMassPerStroke",
     "TransientFuelMassPerStroke", 3985, 6376),
    ("IgnitionSWCEntity", "Task10ms", 66784,
     "CrankFlag, MafRateOut, EngineSpeed, InletAirTemperature, OverrunIgnitionRetard, "
     "IdleFlag, IdleOLFlag, IdleIgnitionCorrection, CoolantTemperature",
     "IgnitionTiming", 3047, 4537),
    ("TotalFuelMassSWCEntity", "Task10ms", 66432,
     "CrankFlag, LambdaCat1, LambdaCat2, CoolantTemperature, OverrunFuelShutoffFlag, "
     "TransientFuelMassPerStroke",
     "TotalFuelMassPerStroke", 743, 1354),
    ("OperatingModeSWCEntity", "Task20ms", 139392,
     "EngineSpeed, VehicleSpeed, IgnitionOn, PowerUpComplete, VotedPedalPosition, IdleSpeedSetpoint",
     "OverrunFuelShutoffFlag, IdleFlag, IdleOLFlag, CrankFlag, OverrunFlag, FuelEnabled, "
     "AFRFeedbackFlag, OverrunIgnitionRetard, UpdatePeriod", 18612, 39281),
    ("IdleSpeedCtrlSWCEntity", "Task20ms", 66976,
     "IdleFlag, EngineSpeed, CoolantTemperature",
     "IdleSpeedSetpoint, IdleThrottleCorrection, IdleIgnitionCorrection", 913, 1686),
    ("APedSensorDiag", "Task100ms", 66288, "PedalAngle1, PedalAngle2", "", 102, 235),
    ("InjBattVoltCorrSWC", "Task100ms", 56928, "BatteryVoltage", "BatVoltCorr", 290, 547),
]

# Все 62 метки с длинами в битах, по алфавиту как в таблице бенчмарка
EXPECTED_LABELS = """
AcceleratorPedalPosition1 16   InjTimeCyl3 16
AcceleratorPedalPosition2 16   InjTimeCyl4 16
AcceleratorPedalPositions 16   InjTimeCyl5 16
AFRFeedbackFlag 1              InjTimeCyl6 16
BaseFuelMassPerStroke 16       InjTimeCyl7 16
BatteryVoltage 16              InjTimeCyl8 16
BatVoltCorr 16                 InletAirTemperature 8
CoolantTemperature 8           LambdaCat1 16
CrankFlag 1                    LambdaCat2 16
CylinderNumber 8               MafRateOut 16
DesiredThrottlePos 16          MAFSensor 16
DesiredThrottlePosOut 16       MAFSensorVoltage 8
EngineSpeed 16                 OverrunFlag 1
FuelEnabled 1                  OverrunFuelShutoffFlag 1
IdleFlag 1                     OverrunIgnitionRetard 8
IdleIgnitionCorrection 8       PedalAngle1 16
IdleOLFlag 1                   PedalAngle2 16
IdleSpeedSetpoint 16           PowerUpComplete 1
IdleThrottleCorrection 16      RateOfThrottleChange 16
IgnitionOn 1                   ThrottleAngle1 16
IgnitionTime1 16               ThrottleAngle2 16
IgnitionTime2 16               ThrottleImpulseBeta1 16
IgnitionTime3 16               ThrottleImpulseBeta2 16
IgnitionTime4 16               ThrottlePosition1 16
IgnitionTime5 16               ThrottlePosition2 16
IgnitionTime6 16               TotalFuelMassPerStroke 16
IgnitionTime7 16               TransientFuelMassPerStroke 16
IgnitionTime8 16               TriggeredCylinderNumber 8
IgnitionTiming 8               UpdatePeriod 16
InjTimeCyl1 16                 VehicleSpeed 16
InjTimeCyl2 16                 VotedPedalPosition 16
"""


def _names(cell: str):
    return [name.strip() for name in cell.split(",") if name.strip()]


def _expected_labels():
    """Левая колонка таблицы, затем правая"""
    rows = [line.split() for line in EXPECTED_LABELS.strip().splitlines()]
    columns = [[(row[0], int(row[1])) for row in rows], [(row[2], int(row[3])) for row in rows]]
    return columns[0] + columns[1]


def test_entity_counts(democar):
    assert democar.task_count() == 6
    assert democar.runnable_count() == 18
    assert democar.label_count() == 62


def test_task_priorities_and_periods(democar):
    priorities = {task.name: task.priority for task in democar.tasks}
    assert priorities == {
        "CylNumTriggeredTask": 30,
        "ActuatorTask": 25,
        "Task5ms": 20,
        "Task10ms": 15,
        "Task20ms": 10,
        "Task100ms": 5,
    }
    periods = {task.name: stimulus.period_us for task, stimulus in democar.periodic_tasks()}
    assert periods == {"Task5ms": 5000, "Task10ms": 10000, "Task20ms": 20000, "Task100ms": 100000}


@pytest.mark.parametrize("name,task,size,reads,writes,bcet,wcet", EXPECTED_RUNNABLES)
def test_runnable_row(democar, name, task, size, reads, writes, bcet, wcet):
    runnable = democar.get_runnable_by_name(name)
    assert runnable.id == runnable_id(name)
    assert runnable.size_bits == size
    assert (runnable.bcet_instructions, runnable.wcet_instructions) == (bcet, wcet)
    assert [democar.get_label_by_id(i).name for i in runnable.reads] == _names(reads)
    assert [democar.get_label_by_id(i).name for i in runnable.writes] == _names(writes)
    assert [t.name for t in democar.tasks_of_runnable(runnable)] == [task]


def test_runnable_order_follows_tasks(democar):
    order = [runnable.name for task in democar.tasks for runnable in democar.task_runnables(task)]
    assert order == [row[0] for row in EXPECTED_RUNNABLES]


def test_label_table(democar):
    expected = _expected_labels()
    assert len(expected) == 62
    assert [(label.name, label.bit_length) for label in democar.labels] == expected
    assert all(label.id == label_id(label.name) for label in democar.labels)


def test_unused_labels(democar):
    used = {ref for runnable in democar.runnables for ref in runnable.reads + runnable.writes}
    unused = [label.name for label in democar.labels if label.id not in used]
    assert unused == ["AcceleratorPedalPositions", "DesiredThrottlePos"]


def test_aperiodic_tasks_triggered_by_label_writes(democar):
    cylnum = democar.get_task_by_name("CylNumTriggeredTask")
    actuator = democar.get_task_by_name("ActuatorTask")
    assert democar.stimulus_of_task(cylnum) == InterProcessStimulus(
        cylnum.stimulus, label_id("CylinderNumber"), 10000
    )
    assert democar.stimulus_of_task(actuator).trigger_label == label_id("TriggeredCylinderNumber")
    assert democar.tasks_triggered_by(label_id("TriggeredCylinderNumber")) == [actuator]
    # TriggeredCylinderNumber пишет только CylNumObserverEntity
    writers = democar.label_writers(democar.get_label_by_name("TriggeredCylinderNumber"))
    assert [r.name for r in writers] == ["CylNumObserverEntity"]


def test_injection_can_be_disabled():
    model = build_democar(injection_period_us=None)
    stimulus = model.stimulus_of_task(model.get_task_by_name("CylNumTriggeredTask"))
    assert stimulus.injection_period_us is None
    assert model.validate() == []


def test_default_hardware(democar):
    assert democar.core_count() == 4
    assert all(core.active for core in democar.cores)
    assert [core.position for core in democar.cores] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert democar.core_types.get(0).ticks_per_instruction == 1
    assert democar.quartzes.get(0).frequency_hz == 200_000_000


def test_platform_activates_first_cores_row_major():
    cores = build_democar_platform(3, 2, 4)
    assert [core.name for core in cores if core.active] == ["Core0", "Core1", "Core2", "Core3"]
    assert cores[3].position == (0, 1)
    with pytest.raises(ValueError):
        build_democar_platform(2, 2, 0)
    with pytest.raises(ValueError):
        build_democar_platform(2, 2, 5)


def test_hardware_parameters():
    core_types, quartzes, cores = democar_hardware(2, 1, 1, frequency_hz=1_000_000, ticks_per_instruction=2)
    assert core_types[0].ticks_per_instruction == 2
    assert quartzes[0].frequency_hz == 1_000_000
    assert [core.active for core in cores] == [True, False]


def test_build_is_deterministic():
    assert build_democar() == build_democar()
    assert all(isinstance(s, (PeriodicStimulus, InterProcessStimulus)) for s in build_democar().stimuli)
