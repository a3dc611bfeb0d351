"""Eisenstein ideals, Iwasawa mu/lambda formulas and weight-2 modular symbols at prime level."""

__version__ = "0.1.0"

from .arith import SetupParams  # noqa: E402,F401
