# utils/__init__.py
from utils.helpers import format_us, format_table, truncate_text

__all__ = [
    "format_us",
    "format_table",
    "truncate_text"
]
