"""Tensor-train recompression of Hadamard products."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    TT,
    BoundsError,
    ConvergenceError,
    DomainError,
    NumericError,
    ResourceError,
    ShapeError,
    UsageError,
)
