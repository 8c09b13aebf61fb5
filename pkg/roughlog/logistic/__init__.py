"""
The degenerate logistic equation: construction, monotone solve and branch continuation.
"""
from .branch import *
from .construction import *
from .nonlinearity import *
from .problem import *
from .solver import *

__all__ = (branch.__all__ + construction.__all__ + nonlinearity.__all__  # NOQA
           + problem.__all__ + solver.__all__)  # NOQA
