import pytest

from roughlog.assembly import Weight, constant_weight
from roughlog.spectral import check_eigenvector_uniqueness, check_spr_identity, check_spr_monotone
from roughlog.tests.helpers import assert_check_passes


@pytest.mark.parametrize("omega", [None, 0.5, 100.0])
def test_spr_identity(dirichlet_square, omega):
    result = check_spr_identity(dirichlet_square, omega)
    assert_check_passes(result)
    assert result.check == "spr_identity"
    assert result.params["n"] == dirichlet_square.n


def test_spr_identity_lshape(dirichlet_lshape):
    assert_check_passes(check_spr_identity(dirichlet_lshape))


def test_spr_monotone(dirichlet_square, degenerate_weight, unit_weight):
    result = check_spr_monotone(dirichlet_square, degenerate_weight, unit_weight)
    assert_check_passes(result)
    assert result.violation < 0
    assert result.params["entrywise"] <= 1e-12


def test_spr_monotone_equal_weights_fails(dirichlet_square, unit_weight):
    result = check_spr_monotone(dirichlet_square, unit_weight, unit_weight)
    assert not result.passed


def test_spr_monotone_unordered(dirichlet_square, degenerate_weight, square_16):
    with pytest.raises(ValueError):
        check_spr_monotone(dirichlet_square, constant_weight(square_16, 2.0), degenerate_weight)


def test_spr_monotone_from_zero(neumann_square, square_16, degenerate_weight):
    assert_check_passes(check_spr_monotone(neumann_square, Weight(square_16, 0.0),
                                           degenerate_weight))


def test_eigenvector_uniqueness(dirichlet_lshape):
    result = check_eigenvector_uniqueness(dirichlet_lshape, n_starts=4, seed=5, workers=2)
    assert_check_passes(result)
    assert result.params == {"n_starts": 4, "seed": 5}
