"""
roughlog
========

Principal eigenvalues, spectral thresholds and the degenerate logistic
equation on rasterized rough domains.
"""
import sys

# Enforce Python version check during package import.
# Must be done before any roughlog imports
__minimum_python_version__ = "3.8"


class UnsupportedPythonError(Exception):
    """Running on an unsupported version of Python."""


if sys.version_info < tuple(int(val) for val in __minimum_python_version__.split('.')):
    raise UnsupportedPythonError(
        f"roughlog does not support Python < {__minimum_python_version__}")

from .config import conf  # NOQA
from .logger import log  # NOQA
from .version import version as __version__  # NOQA

from .assembly import DiscreteOperator, Weight, assemble_divergence_form, assemble_laplacian  # NOQA
from .domain import DomainMask, GridSpec, make_domain  # NOQA
from .logistic import LogisticProblem, continue_branch, solve_logistic  # NOQA
from .spectral import lambda_star, principal_pair  # NOQA

__all__ = ['conf', 'log', 'GridSpec', 'DomainMask', 'make_domain', 'DiscreteOperator', 'Weight',
           'assemble_laplacian', 'assemble_divergence_form', 'principal_pair', 'lambda_star',
           'LogisticProblem', 'solve_logistic', 'continue_branch']
