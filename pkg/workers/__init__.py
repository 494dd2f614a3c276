# workers/__init__.py
from workers.evaluation import EvaluationPool

__all__ = [
    "EvaluationPool",
]
