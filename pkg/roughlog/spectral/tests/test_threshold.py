import numpy as np
import pytest
from numpy.testing import assert_allclose

from roughlog.assembly import Weight, indicator_weight
from roughlog.domain import cells_in_box, inradius
from roughlog.spectral import (default_gamma_schedule, eigenvector_comparison, lambda_star,
                               principal_pair, support_touches_boundary, weight_continuity_probe)
from roughlog.utils.exceptions import MaskMismatchError, PreconditionError, RoughlogUserWarning
from roughlog.utils.io import read_table


@pytest.fixture
def square_lstar(dirichlet_square, degenerate_weight):
    return lambda_star(dirichlet_square, degenerate_weight, workers=1)


def test_default_schedule():
    schedule = default_gamma_schedule()
    assert len(schedule) == 31
    assert schedule[0] == 1
    assert schedule[-1] == 2 ** 30


def test_degenerate_threshold_is_dirichlet_on_zero_set(square_lstar):
    # the zero set is a 7x7 block whose ghost cells sit 1/2 apart
    expected = 2 * 2 * 16 ** 2 * (1 - np.cos(np.pi / 8))
    assert not square_lstar.is_infinite
    assert_allclose(square_lstar.value, expected, rtol=1e-6)


def test_trace_is_monotone(square_lstar, dirichlet_square):
    gammas, values = zip(*square_lstar.gamma_trace)
    assert list(gammas) == default_gamma_schedule()
    assert np.all(np.diff(values) >= 0)
    assert values[0] > principal_pair(dirichlet_square).lambda1
    assert square_lstar.value >= values[-1]


def test_trace_table(tmp_path, square_lstar):
    path = tmp_path / "lstar.csv"
    square_lstar.write(path)
    table = read_table(path)
    assert table.colnames == ["gamma", "lambda1"]
    assert len(table) == 31
    assert_allclose(table["lambda1"], square_lstar.to_table()["lambda1"], rtol=1e-12)


def test_positive_weight_diverges(dirichlet_square, unit_weight):
    result = lambda_star(dirichlet_square, unit_weight, schedule=[1, 2, 4, 8])
    assert result.is_infinite
    assert not result.extrapolated
    assert not result.converged


def test_short_schedule(dirichlet_square, degenerate_weight):
    result = lambda_star(dirichlet_square, degenerate_weight, schedule=[1, 2])
    assert result.value == result.gamma_trace[-1][1]
    assert not result.extrapolated


@pytest.mark.parametrize("schedule", [[1.0], [2.0, 1.0], [1.0, 1.0, 2.0]])
def test_invalid_schedule(dirichlet_square, degenerate_weight, schedule):
    with pytest.raises(ValueError):
        lambda_star(dirichlet_square, degenerate_weight, schedule=schedule)


def test_zero_weight(dirichlet_square, square_16):
    with pytest.raises(PreconditionError):
        lambda_star(dirichlet_square, Weight(square_16, 0.0))


def test_weight_on_other_mask(dirichlet_square, square_32):
    with pytest.raises(MaskMismatchError):
        lambda_star(dirichlet_square, Weight(square_32, 1.0))


def test_eigenvector_comparison(dirichlet_square, square_16, degenerate_weight):
    inner = indicator_weight(square_16, cells_in_box(square_16, (0.25, 0.25), (0.75, 0.75)))
    assert not support_touches_boundary(inner)
    # both eigenvectors have unit norm, so the constant is at least one
    assert 1 <= eigenvector_comparison(dirichlet_square, inner) < np.inf
    assert support_touches_boundary(degenerate_weight)
    with pytest.raises(PreconditionError):
        eigenvector_comparison(dirichlet_square, degenerate_weight)


def test_continuity_probe(dirichlet_square, degenerate_weight):
    h = dirichlet_square.h
    table = weight_continuity_probe(dirichlet_square, degenerate_weight, [3 * h, 2 * h, h, 0.0],
                                    workers=2)
    assert table.colnames == ["delta", "lambda1", "vector_distance"]
    assert np.all(np.diff(table["lambda1"]) >= -1e-9)
    assert table["vector_distance"][-1] <= 1e-12
    assert table["vector_distance"][0] > table["vector_distance"][-1]


def test_continuity_probe_needs_decreasing_deltas(dirichlet_square, degenerate_weight):
    with pytest.raises(ValueError):
        weight_continuity_probe(dirichlet_square, degenerate_weight, [0.0, 0.1])


def test_continuity_schedule_ends_at_zero(dirichlet_square, degenerate_weight):
    h = dirichlet_square.h
    with pytest.raises(ValueError, match="end at 0"):
        weight_continuity_probe(dirichlet_square, degenerate_weight, [2 * h, h])


def test_continuity_warns_on_empty_truncation(dirichlet_square, degenerate_weight):
    delta = inradius(dirichlet_square.mask)
    with pytest.warns(RoughlogUserWarning, match="leaves nothing"):
        table = weight_continuity_probe(dirichlet_square, degenerate_weight, [delta, 0.0],
                                        workers=1)
    assert_allclose(table["lambda1"][0], principal_pair(dirichlet_square).lambda1, rtol=1e-8)
