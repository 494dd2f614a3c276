# handlers/inspect_model.py - Команда inspect: сводка и таблицы модели

import logging

from handlers.common import EXIT_OK, load_model
from model.models import InterProcessStimulus, PeriodicStimulus
from model.system import AmaltheaModel, ModelError
from utils.helpers import format_table, truncate_text

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("inspect", help="показать содержимое модели")
    parser.add_argument("file", help="файл модели AMALTHEA (XML)")
    parser.add_argument("--tables", action="store_true", help="вывести таблицы задач, runnable и меток")
    parser.set_defaults(handler=handle)


def _stimulus_text(model: AmaltheaModel, task) -> str:
    stimulus = model.stimulus_of_task(task)
    if isinstance(stimulus, PeriodicStimulus):
        return f"periodic {stimulus.period_us} us"
    if isinstance(stimulus, InterProcessStimulus):
        label = model.get_label_by_id(stimulus.trigger_label)
        return f"on write {label.name if label else stimulus.trigger_label}"
    return type(stimulus).__name__.replace("Stimulus", "").lower()


def _names(model: AmaltheaModel, label_ids) -> str:
    return truncate_text(", ".join(model.get_label_by_id(i).name for i in label_ids), 40)


def print_tables(model: AmaltheaModel) -> None:
    print()
    print(format_table(
        ["task", "priority", "stimulus", "runnables"],
        [
            (task.name, task.priority, _stimulus_text(model, task), len(task.runnables))
            for task in sorted(model.tasks, key=lambda t: -t.priority)
        ],
    ))
    print()
    print(format_table(
        ["runnable", "task", "size_bits", "bcet", "wcet", "reads", "writes"],
        [
            (
                runnable.name,
                ", ".join(task.name for task in model.tasks_of_runnable(runnable)),
                runnable.size_bits,
                runnable.bcet_instructions,
                runnable.wcet_instructions,
                _names(model, runnable.reads),
                _names(model, runnable.writes),
            )
            for runnable in model.runnables
        ],
    ))
    print()
    print(format_table(["label", "bit_length"], [(label.name, label.bit_length) for label in model.labels]))


def handle(args) -> int:
    model = load_model(args.file)

    print(f"tasks: {model.task_count()}")
    print(f"runnables: {model.runnable_count()}")
    print(f"labels: {model.label_count()}")
    print(f"stimuli: {model.stimulus_count()}")
    print(f"cores: {model.core_count()} ({sum(1 for core in model.cores if core.active)} active)")
    try:
        print(f"hyperperiod_us: {model.hyperperiod()}")
    except ModelError:
        print("hyperperiod_us: none")

    if args.tables:
        print_tables(model)
    return EXIT_OK
