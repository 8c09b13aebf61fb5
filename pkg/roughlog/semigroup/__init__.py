"""
The semigroup ``T(t) = exp(-tA)``: time stepping, dense propagators and property checks.
"""
from roughlog.utils.results import CheckResult

from .checks import *
from .evolution import *

__all__ = ['CheckResult'] + checks.__all__ + evolution.__all__  # NOQA
