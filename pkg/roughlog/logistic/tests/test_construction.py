import numpy as np
import pytest
from numpy.testing import assert_allclose

from roughlog.logistic import (Subsolution, build_subsolution, build_supersolution,
                               is_subsolution, is_supersolution, order_pair, pick_omega)
from roughlog.spectral import lambda_star
from roughlog.utils.exceptions import PreconditionError


@pytest.fixture
def interval_lstar(dirichlet_interval, interval_weight):
    return lambda_star(dirichlet_interval, interval_weight, workers=1)


def test_subsolution(interval_problem):
    sub = build_subsolution(interval_problem)
    assert sub.epsilon > 0
    assert np.all(sub.vector > 0)
    assert_allclose(sub.vector, sub.epsilon * interval_problem.principal.u)
    assert is_subsolution(interval_problem, sub.vector)


def test_subsolution_below_lambda1(interval_problem):
    with pytest.raises(PreconditionError):
        build_subsolution(interval_problem.with_lambda(5.0))


def test_subsolution_scale_of_constant_case(neumann_problem):
    # psi is constant, so epsilon psi stays below the solution u = 2
    sub = build_subsolution(neumann_problem)
    assert np.all(sub.vector < 2.0)
    assert_allclose(sub.vector, sub.vector[0])


def test_supersolution(interval_problem, interval_lstar):
    sup = build_supersolution(interval_problem, lstar=interval_lstar)
    assert is_supersolution(interval_problem, sup.vector)
    assert np.all(sup.vector > 0)
    assert sup.mu > interval_problem.lam
    assert sup.gamma >= 1
    assert not sup.m_delta.is_zero
    assert_allclose(sup.vector, sup.kappa * sup.phi)


def test_supersolution_with_given_delta(interval_problem, interval_lstar):
    h = interval_problem.op.h
    sup = build_supersolution(interval_problem, delta=h, lstar=interval_lstar)
    assert sup.delta == h
    assert is_supersolution(interval_problem, sup.vector)


def test_supersolution_at_threshold(interval_problem, interval_lstar):
    with pytest.raises(PreconditionError):
        build_supersolution(interval_problem.with_lambda(interval_lstar.value + 1),
                            lstar=interval_lstar)


def test_supersolution_with_empty_truncation(interval_problem, interval_lstar):
    with pytest.raises(PreconditionError):
        build_supersolution(interval_problem, delta=0.3, lstar=interval_lstar)


def test_supersolution_infinite_threshold(neumann_problem):
    sup = build_supersolution(neumann_problem, lstar=np.inf)
    assert is_supersolution(neumann_problem, sup.vector)


def test_order_pair(interval_problem, interval_lstar):
    sub = build_subsolution(interval_problem)
    sup = build_supersolution(interval_problem, lstar=interval_lstar)
    pair = order_pair(interval_problem, sub, sup)
    assert pair.margin > 0
    assert pair.kappa >= sup.kappa
    assert np.all(pair.sub < pair.super)
    assert pair.omega > -interval_problem.lambda1
    assert is_supersolution(interval_problem, pair.super)


def test_order_pair_raises_kappa(neumann_problem):
    sub = build_subsolution(neumann_problem)
    sup = build_supersolution(neumann_problem, lstar=np.inf)
    # shrink the supersolution below the subsolution; ordering must enlarge it again
    small = sup._replace(kappa=sup.kappa * 1e-6, vector=sup.vector * 1e-6)
    pair = order_pair(neumann_problem, sub, small)
    assert np.all(pair.sub < pair.super)
    assert pair.kappa > small.kappa


def test_order_pair_needs_positive_sub(interval_problem, interval_lstar):
    sup = build_supersolution(interval_problem, lstar=interval_lstar)
    sub = Subsolution(np.nan, np.zeros(interval_problem.n))
    with pytest.raises(PreconditionError):
        order_pair(interval_problem, sub, sup)


def test_pick_omega_linear(neumann_problem):
    # m (g + g' xi) - lambda = 2 k - 2 at k = 3, plus the margin
    assert_allclose(pick_omega(neumann_problem, 3.0), 5.0)
    assert_allclose(pick_omega(neumann_problem, 3.0, margin=0.5, lower=10.0), 10.5)


def test_pick_omega_stays_above_minus_lambda1(interval_problem):
    omega = pick_omega(interval_problem, 1e-3, margin=0.0)
    assert omega > -interval_problem.lambda1


def test_pick_omega_negative_bound(neumann_problem):
    with pytest.raises(ValueError):
        pick_omega(neumann_problem, -1.0)


def test_residual_predicates(neumann_problem):
    assert is_subsolution(neumann_problem, np.full(neumann_problem.n, 1.0))
    assert not is_supersolution(neumann_problem, np.full(neumann_problem.n, 1.0))
    assert is_supersolution(neumann_problem, np.full(neumann_problem.n, 3.0))
    assert is_subsolution(neumann_problem, 2.0) and is_supersolution(neumann_problem, 2.0)
