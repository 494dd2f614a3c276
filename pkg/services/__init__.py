# services/__init__.py
from services.amalthea_xml import (
    AmaltheaParseError,
    ParseError,
    ParseErrorKind,
    parse,
    parse_file,
    serialize,
    write_file,
)
from services.democar import build_democar, build_democar_platform, democar_hardware
from services.noc import NocError, NocPlatform, Route, parse_mesh, platform_for_model
from services.allocation import (
    Allocation,
    AllocationError,
    all_on_core,
    check_allocation,
    load_allocation,
    save_allocation,
)
from services.scheduler import (
    ScheduleSimulator,
    SimResult,
    SimulationError,
    generate_jobs,
    simulate,
    write_trace_csv,
)
from services.genetic import (
    AllocationProblem,
    Fitness,
    GaConfig,
    GaConfigError,
    GaHistory,
    GeneticAllocator,
    decode,
    encode,
    evaluate,
    run,
    write_history_csv,
)

__all__ = [
    "AmaltheaParseError",
    "ParseError",
    "ParseErrorKind",
    "parse",
    "parse_file",
    "serialize",
    "write_file",
    "build_democar",
    "build_democar_platform",
    "democar_hardware",
    "NocError",
    "NocPlatform",
    "Route",
    "parse_mesh",
    "platform_for_model",
    "Allocation",
    "AllocationError",
    "all_on_core",
    "check_allocation",
    "load_allocation",
    "save_allocation",
    "ScheduleSimulator",
    "SimResult",
    "SimulationError",
    "generate_jobs",
    "simulate",
    "write_trace_csv",
    "AllocationProblem",
    "Fitness",
    "GaConfig",
    "GaConfigError",
    "GaHistory",
    "GeneticAllocator",
    "decode",
    "encode",
    "evaluate",
    "run",
    "write_history_csv",
]
