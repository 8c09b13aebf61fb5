"""
This file contains a set of common fixtures to get a set of different but
predictable masks, operators and weights.
"""
import logging
import warnings

import numpy as np
import pytest

from roughlog.assembly import BoundaryCondition, assemble_laplacian, constant_weight, indicator_weight
from roughlog.domain import Boxes, GridSpec, LShape, Slit, cells_in_box, make_domain
from roughlog.logistic import Linear, LogisticProblem
from roughlog.tests.helpers import interval_mask, square_mask
from roughlog.utils.exceptions import RoughlogUserWarning

console_logger = logging.getLogger()
console_logger.setLevel('INFO')


################################################################################
# Helper Functions
################################################################################


def centered_subsquare(mask):
    return cells_in_box(mask, (0.25, 0.25), (0.75, 0.75))


################################################################################
# Mask Fixtures
################################################################################


@pytest.fixture
def interval_64():
    return interval_mask(1 / 64)


@pytest.fixture
def square_16():
    return square_mask(1 / 16)


@pytest.fixture
def square_32():
    return square_mask(1 / 32)


@pytest.fixture
def lshape_16():
    return make_domain(LShape(), GridSpec.nodal(1 / 16))


@pytest.fixture
def slit_16():
    return make_domain(Slit(), GridSpec.nodal(1 / 16))


@pytest.fixture
def two_squares():
    boxes = Boxes([[[0.0, 0.0], [0.4, 1.0]], [[0.6, 0.0], [1.0, 1.0]]])
    return make_domain(boxes, GridSpec.nodal(1 / 20))


################################################################################
# Operator Fixtures
################################################################################


@pytest.fixture
def dirichlet_interval(interval_64):
    return assemble_laplacian(interval_64, "dirichlet")


@pytest.fixture
def dirichlet_square(square_16):
    return assemble_laplacian(square_16, "dirichlet")


@pytest.fixture
def neumann_square(square_16):
    return assemble_laplacian(square_16, "neumann")


@pytest.fixture
def robin_square(square_16):
    return assemble_laplacian(square_16, BoundaryCondition.robin(2.0))


@pytest.fixture(params=["dirichlet", "neumann", "robin"])
def square_operator(request, square_16):
    bc = BoundaryCondition.robin(2.0) if request.param == "robin" else request.param
    return assemble_laplacian(square_16, bc)


@pytest.fixture
def dirichlet_lshape(lshape_16):
    return assemble_laplacian(lshape_16, "dirichlet")


@pytest.fixture
def disconnected_operator(two_squares):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RoughlogUserWarning)
        return assemble_laplacian(two_squares, "dirichlet")


################################################################################
# Weight Fixtures
################################################################################


@pytest.fixture
def unit_weight(square_16):
    return constant_weight(square_16)


@pytest.fixture
def degenerate_weight(square_16):
    """
    One outside the centered sub-square ``(1/4, 3/4)^2`` and zero on it.
    """
    return indicator_weight(square_16, ~centered_subsquare(square_16))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


################################################################################
# Logistic Fixtures
################################################################################


@pytest.fixture
def interval_weight(interval_64):
    """
    One outside ``(1/4, 3/4)`` and zero on it.
    """
    return indicator_weight(interval_64, ~cells_in_box(interval_64, 0.25, 0.75))


@pytest.fixture
def interval_problem(dirichlet_interval, interval_weight):
    return LogisticProblem(dirichlet_interval, interval_weight, Linear(), 25.0)


@pytest.fixture
def neumann_problem(neumann_square, unit_weight):
    return LogisticProblem(neumann_square, unit_weight, Linear(), 2.0)
