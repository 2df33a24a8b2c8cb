"""Automaton-constrained Q-learning: temporal-logic tasks on gridworlds.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from acql._core import (
    ConfigurationError,
    FormulaParseError,
    HoaFormatError,
    Task,
    UnsupportedFormulaError,
    build_task,
    parse,
    robustness,
    train,
)

__all__ = [
    "ConfigurationError",
    "FormulaParseError",
    "HoaFormatError",
    "Task",
    "UnsupportedFormulaError",
    "build_task",
    "parse",
    "robustness",
    "train",
]
