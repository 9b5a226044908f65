"""Polarizer cascade, hidden-variable and Bell-operator models."""

from ._polcascade import *  # noqa: F401,F403
from ._polcascade import BudgetExceeded, IdealMalus, GeneralizedMalus, HvStep, TabulatedResponse  # noqa: F401

__version__ = "0.1.0"
