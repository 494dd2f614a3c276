# utils/helpers.py - Вспомогательные функции форматирования вывода

from typing import Iterable, List, Sequence

from model.system import NS_PER_US


def format_us(nanoseconds: int) -> str:
    """
    Форматирует время в наносекундах как микросекунды с тремя знаками.

    Args:
        nanoseconds: Время в нс

    Returns:
        Строка вида "1234.567"
    """
    sign = "-" if nanoseconds < 0 else ""
    value = abs(nanoseconds)
    return f"{sign}{value // NS_PER_US}.{value % NS_PER_US:03d}"


def truncate_text(text: str, max_length: int = 40) -> str:
    """
    Обрезает текст до указанной длины.

    Args:
        text: Исходный текст
        max_length: Максимальная длина

    Returns:
        Обрезанный текст с "..." если нужно
    """
    if len(text) <= max_length:
        return text
    return text[:max_length - 3] + "..."


def format_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Таблица с выравниванием столбцов по ширине"""
    cells: List[List[str]] = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]

    def line(row: Sequence[str]) -> str:
        return "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()

    separator = "  ".join("-" * width for width in widths)
    return "\n".join([line(cells[0]), separator] + [line(row) for row in cells[1:]])
