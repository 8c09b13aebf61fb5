"""
Rasterized domains: grids, masks, cell sets and the shapes they are built from.
"""
from .grid import *
from .shapes import *

__all__ = grid.__all__ + shapes.__all__  # NOQA
