"""Exact analysis toolkit for information extraction from a strategic sender."""

from .core import Distribution, JointType, TypeVector
from .game import ReceiverStrategy, TieRule, evaluate, make_strategy, type_level_evaluate
from .utility import UtilityMatrix, gamma, gamma_sign, normalize

__all__ = [
    "Distribution",
    "JointType",
    "ReceiverStrategy",
    "TieRule",
    "TypeVector",
    "UtilityMatrix",
    "evaluate",
    "gamma",
    "gamma_sign",
    "make_strategy",
    "normalize",
    "type_level_evaluate",
]

__version__ = "0.1.0"
