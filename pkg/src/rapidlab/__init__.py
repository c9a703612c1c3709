"""Bit-accurate models of Mitchell and RAPID approximate multipliers and dividers."""

from .mitchell import (
    DivisionByZero,
    DivUnit,
    MulUnit,
    QuotientOverflow,
    exact_div,
    exact_mul,
    mitchell_div,
    mitchell_mul,
)
from .rapidscheme import Scheme, SchemeError, get_scheme, load_scheme, save_scheme
from .wordcore import ConfigurationError, Frac, Word

__all__ = [
    "ConfigurationError", "DivUnit", "DivisionByZero", "Frac", "MulUnit", "QuotientOverflow",
    "Scheme", "SchemeError", "Word", "exact_div", "exact_mul", "get_scheme", "load_scheme",
    "mitchell_div", "mitchell_mul", "save_scheme",
]
__version__ = "0.1.0"
