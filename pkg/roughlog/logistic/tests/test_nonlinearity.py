import numpy as np
import pytest
from numpy.testing import assert_allclose

from roughlog.logistic import NONLINEARITIES, Linear, Log1p, Nonlinearity, Polynomial, Power

ALL = [Linear(), Power(2.0), Power(3.5), Log1p(), Polynomial([0.5, 0.0, 2.0])]


@pytest.mark.parametrize("g", ALL, ids=repr)
def test_assumptions(g):
    assert g.check_assumptions() == {"zero": True, "increasing": True, "unbounded": True}


@pytest.mark.parametrize("g", ALL, ids=repr)
def test_odd_extension(g):
    xi = np.array([0.5, 1.0, 4.0])
    assert_allclose(g.g(-xi), -g.g(xi))
    assert_allclose(g.dg(-xi), g.dg(xi))


@pytest.mark.parametrize("g", ALL, ids=repr)
def test_derivative(g):
    xi = np.linspace(0.1, 5, 20)
    eps = 1e-6
    assert_allclose(g.dg(xi), (g.g(xi + eps) - g.g(xi - eps)) / (2 * eps), rtol=1e-6)


@pytest.mark.parametrize("g", ALL, ids=repr)
def test_inverse(g):
    for y in (0.1, 1.0, 7.5):
        assert_allclose(g.g(g.inverse(y)), y, rtol=1e-12)
    assert g.inverse(0.0) == 0.0
    assert g.inverse(-1.0) == 0.0


def test_polynomial_inverse_by_bisection():
    assert_allclose(Polynomial([1.0, 1.0]).inverse(2.0), 1.0, rtol=1e-14)


def test_power_values():
    g = Power(3.0)
    assert_allclose(g.g(2.0), 8.0)
    assert_allclose(g.dg(2.0), 12.0)
    assert_allclose(g.envelope(2.0), 32.0)


def test_max_envelope_of_increasing_envelope():
    g = Log1p()
    k = np.array([0.5, 2.0, 10.0])
    assert_allclose(g.max_envelope(k), g.envelope(k))


def test_max_envelope_zero_bound():
    assert_allclose(Linear().max_envelope(np.zeros(3)), 0.0)


def test_max_envelope_per_cell():
    # the sampled envelope of 2 xi is exact at every sample and at the bound
    assert_allclose(Linear().max_envelope([1.0, 3.0]), [2.0, 6.0])


@pytest.mark.parametrize("g", ALL, ids=repr)
def test_config_round_trip(g):
    rebuilt = Nonlinearity.from_config(g.to_config())
    assert type(rebuilt) is type(g)
    assert rebuilt.to_config() == g.to_config()


@pytest.mark.parametrize("config", [{}, {"family": "cubic"}, {"family": "power", "p": 0.5},
                                    {"family": "power", "q": 2},
                                    {"family": "polynomial", "coefficients": [-1.0, 1.0]},
                                    {"family": "polynomial", "coefficients": [0.0]}])
def test_from_config_invalid(config):
    with pytest.raises(ValueError):
        Nonlinearity.from_config(config)


def test_registry_and_repr():
    assert set(NONLINEARITIES) == {"power", "linear", "log1p", "polynomial"}
    assert repr(Power(2)) == "Power(p=2.0)"
    assert repr(Linear()) == "Linear()"
