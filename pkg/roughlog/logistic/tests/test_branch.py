import numpy as np
import pytest
from numpy.testing import assert_allclose

from roughlog.logistic import (Branch, branch_derivative, continue_branch,
                               derivative_by_differences, reachable_ratio, solve_logistic,
                               write_branch)
from roughlog.spectral import lambda_star
from roughlog.utils.exceptions import PreconditionError
from roughlog.utils.io import read_table

LAMBDAS = [15.0, 20.0, 25.0, 30.0]


@pytest.fixture
def interval_lstar(dirichlet_interval, interval_weight):
    return lambda_star(dirichlet_interval, interval_weight, workers=1)


@pytest.fixture
def interval_branch(interval_problem, interval_lstar):
    return continue_branch(interval_problem, LAMBDAS, lstar=interval_lstar)


def test_branch_is_increasing(interval_branch):
    assert len(interval_branch) == 4
    assert interval_branch.strictly_increasing
    assert np.all(np.diff(interval_branch.sup_norms) > 0)
    assert_allclose(interval_branch.lambdas, LAMBDAS)


def test_branch_derivatives_are_positive(interval_branch):
    for v in interval_branch.derivatives:
        assert v is not None
        assert v.min() > 0


def test_branch_matches_single_solves(interval_problem, interval_branch, interval_lstar):
    single = solve_logistic(interval_problem.with_lambda(20.0), lstar=interval_lstar)
    assert_allclose(interval_branch.solutions[1].u, single.u, rtol=1e-6)


def test_branch_table(tmp_path, interval_branch):
    path = tmp_path / "branch.csv"
    write_branch(interval_branch, path)
    table = read_table(path)
    assert table.colnames == ["lambda", "sup_norm", "stability_margin", "pev_gap", "iterations"]
    assert_allclose(table["lambda"], LAMBDAS)
    assert np.all(table["stability_margin"] > 0)


def test_reachable_ratio(interval_branch, interval_lstar):
    assert_allclose(reachable_ratio(interval_branch), 30.0 / interval_lstar.value)
    assert np.isnan(reachable_ratio(interval_branch, np.inf))
    assert np.isnan(reachable_ratio(Branch([], [], [])))


def test_derivative_against_differences(interval_problem, interval_lstar):
    problem = interval_problem.with_lambda(20.0)
    u = solve_logistic(problem, lstar=interval_lstar).u
    exact = branch_derivative(problem, u)
    approx = derivative_by_differences(problem, eta=1e-3, lstar=interval_lstar)
    assert_allclose(approx, exact, rtol=1e-3)


def test_derivative_refuses_small_margin(interval_problem):
    u = np.ones(interval_problem.n)
    with pytest.raises(PreconditionError):
        branch_derivative(interval_problem, u, margin=0.0)


@pytest.mark.parametrize("lambdas", [[], [20.0, 15.0], [20.0, 20.0]])
def test_invalid_grid(interval_problem, interval_lstar, lambdas):
    with pytest.raises(ValueError):
        continue_branch(interval_problem, lambdas, lstar=interval_lstar)


@pytest.mark.parametrize("lambdas", [[5.0, 20.0], [20.0, 45.0]])
def test_grid_outside_existence_interval(interval_problem, interval_lstar, lambdas):
    with pytest.raises(PreconditionError):
        continue_branch(interval_problem, lambdas, lstar=interval_lstar)


def test_branch_without_derivatives(interval_problem, interval_lstar):
    branch = continue_branch(interval_problem, [20.0, 22.0], lstar=interval_lstar.value,
                             derivatives=False)
    assert branch.derivatives == [None, None]
    assert branch.lstar == interval_lstar.value
