"""
Helpers for testing roughlog.
"""
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from roughlog.domain import GridSpec, Interval, Square, make_domain
from roughlog.utils.results import CheckResult

__all__ = ['interval_mask',
           'square_mask',
           'assert_masks_equal',
           'assert_operators_equal',
           'assert_strictly_positive',
           'assert_unit_vector',
           'assert_check_passes',
           'dirichlet_interval_eigenvalue']


def interval_mask(h):
    return make_domain(Interval(), GridSpec.nodal(h, ((0.0, 1.0),)))


def square_mask(h, lower=(0.0, 0.0), upper=(1.0, 1.0)):
    return make_domain(Square(lower, upper), GridSpec.nodal(h, tuple(zip(lower, upper))))


def assert_masks_equal(mask1, mask2):
    assert mask1.grid == mask2.grid
    assert_array_equal(mask1.interior, mask2.interior)
    assert mask1.n == mask2.n


def assert_operators_equal(op1, op2, rtol=0):
    assert_masks_equal(op1.mask, op2.mask)
    assert op1.flags == op2.flags
    assert_allclose(op1.matrix.toarray(), op2.matrix.toarray(), rtol=rtol, atol=0)


def assert_strictly_positive(u):
    u = np.asarray(u)
    assert np.all(np.isfinite(u))
    assert u.min() > 0, f"minimum entry {u.min()} is not positive"


def assert_unit_vector(u, rtol=1e-12):
    assert_allclose(np.linalg.norm(u), 1.0, rtol=rtol)


def assert_check_passes(result):
    """
    Assert that a `~roughlog.utils.results.CheckResult` passed, showing it otherwise.
    """
    assert isinstance(result, CheckResult)
    assert result.passed, str(result)


def dirichlet_interval_eigenvalue(h):
    """
    The closed form ``(2 / h^2)(1 - cos(pi h))`` of the smallest eigenvalue of the
    second difference matrix on ``(0, 1)``.
    """
    return 2 / h ** 2 * (1 - np.cos(np.pi * h))
