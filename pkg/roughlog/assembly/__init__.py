"""
Sparse Z-matrix discretizations of elliptic operators, boundary conditions and weights.
"""
from .coefficients import *
from .operator import *
from .weights import *

__all__ = coefficients.__all__ + operator.__all__ + weights.__all__  # NOQA
