"""
Configuration-driven command line front end.

The ``roughlog`` command lives in `roughlog.expcli.main`.
"""
from .config import *
from .suite import *
from .tasks import *

__all__ = config.__all__ + suite.__all__ + tasks.__all__  # NOQA
