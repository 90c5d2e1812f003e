"""Executable finite-difference characterizations of Hoelder-Zygmund regularity."""

from . import bump, corpus, curvelab, errors, finitediff, seminorm, stencil, superposition
from .corpus import make_function
from .errors import ZygmundError
from .seminorm import SampledFn, classify, estimate_exponent

__version__ = "0.1.0"

__all__ = [
    "SampledFn",
    "ZygmundError",
    "bump",
    "classify",
    "corpus",
    "curvelab",
    "errors",
    "estimate_exponent",
    "finitediff",
    "make_function",
    "seminorm",
    "stencil",
    "superposition",
]
