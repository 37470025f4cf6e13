"""Errors and runtime settings shared by every package."""

from src.utils.errors import ConditionNotSatisfied, InvalidInputError, PreconditionError, ToeplitzRDError
from src.utils.settings import Settings, load_settings

__all__ = [
    "ConditionNotSatisfied",
    "InvalidInputError",
    "PreconditionError",
    "Settings",
    "ToeplitzRDError",
    "load_settings",
]
