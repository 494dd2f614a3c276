# model/__init__.py
from model.models import (
    Label,
    Runnable,
    Task,
    PeriodicStimulus,
    SporadicStimulus,
    SingleStimulus,
    PatternStimulus,
    InterProcessStimulus,
    Stimulus,
    CoreType,
    Quartz,
    Core,
    ExecutionBound,
)
from model.system import (
    AmaltheaModel,
    EntityRegistry,
    DependencyEdge,
    ModelError,
    NS_PER_US,
    execution_time,
    execution_time_ns,
    hyperperiod,
)
from model.validation import Violation, ModelValidationError, validate

__all__ = [
    "Label",
    "Runnable",
    "Task",
    "PeriodicStimulus",
    "SporadicStimulus",
    "SingleStimulus",
    "PatternStimulus",
    "InterProcessStimulus",
    "Stimulus",
    "CoreType",
    "Quartz",
    "Core",
    "ExecutionBound",
    "AmaltheaModel",
    "EntityRegistry",
    "DependencyEdge",
    "ModelError",
    "NS_PER_US",
    "execution_time",
    "execution_time_ns",
    "hyperperiod",
    "Violation",
    "ModelValidationError",
    "validate",
]
