# handlers/__init__.py
from handlers import democar_emit, evaluate, inspect_model, optimize, validate

# Порядок регистрации - порядок подкоманд в справке
COMMANDS = [democar_emit, validate, inspect_model, evaluate, optimize]

__all__ = [
    "COMMANDS",
    "democar_emit",
    "validate",
    "inspect_model",
    "evaluate",
    "optimize"
]
