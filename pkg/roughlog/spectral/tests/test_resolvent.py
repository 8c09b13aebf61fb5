import numpy as np
import pytest
from numpy.testing import assert_allclose

from roughlog.assembly import EllipticCoefficients, assemble_divergence_form
from roughlog.spectral import Resolvent, resolvent_solve
from roughlog.utils.exceptions import SolverFailure


def test_solve_residual(square_operator, rng):
    f = rng.uniform(size=square_operator.n)
    resolvent = Resolvent(square_operator, 1.0)
    u = resolvent.solve(f)
    assert_allclose(resolvent.matrix @ u, f, atol=1e-10)


@pytest.mark.parametrize("omega", [1e-3, 1.0, 1e4])
def test_solution_is_nonnegative(square_operator, rng, omega):
    f = rng.uniform(size=square_operator.n)
    f[rng.uniform(size=f.size) < 0.5] = 0
    u = resolvent_solve(square_operator, omega, f)
    assert u.min() >= 0


def test_point_source_spreads_everywhere(dirichlet_lshape):
    f = np.zeros(dirichlet_lshape.n)
    f[0] = 1.0
    # irreducibility: one cell feeds every other cell
    assert resolvent_solve(dirichlet_lshape, 1.0, f).min() > 0


def test_negative_shift_above_minus_lambda1(dirichlet_interval):
    # omega = -9 still exceeds -lambda_1 = -9.87
    u = resolvent_solve(dirichlet_interval, -9.0, 1.0)
    assert u.min() > 0


def test_zero_right_hand_side(dirichlet_square):
    assert not np.any(resolvent_solve(dirichlet_square, 1.0, 0.0))


def test_transposed_solve(square_16, rng):
    coeffs = EllipticCoefficients(square_16, b_k=(2.0, -3.0))
    op = assemble_divergence_form(square_16, coeffs, "dirichlet")
    resolvent = Resolvent(op, 0.5)
    f = rng.uniform(size=op.n)
    u = resolvent.solve(f, transpose=True)
    assert_allclose(resolvent.matrix.T @ u, f, atol=1e-10)


def test_singular_shift(neumann_square):
    with pytest.raises(SolverFailure):
        Resolvent(neumann_square, 0.0).solve(np.ones(neumann_square.n))


def test_condition_estimate(dirichlet_square):
    resolvent = Resolvent(dirichlet_square, 1.0)
    assert resolvent.condition_estimate() > 1
