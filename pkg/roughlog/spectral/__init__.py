"""
Resolvents, principal eigenpairs, spectral gaps and the degenerate threshold.
"""
from .checks import *
from .principal import *
from .resolvent import *
from .threshold import *

__all__ = checks.__all__ + principal.__all__ + resolvent.__all__ + threshold.__all__  # NOQA
