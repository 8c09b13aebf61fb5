import numpy as np
import pytest

from roughlog.domain import (SHAPES, Annulus, Boxes, Cusp, Disk, GridSpec, Interval, Koch, LShape,
                             ShapeSpec, Slit, Square, is_connected, koch_vertices, make_domain,
                             points_in_polygon)
from roughlog.utils.exceptions import DegenerateDomainError, RoughlogUserWarning


@pytest.mark.parametrize("shape, h, expected_n", [
    (Interval(), 1 / 64, 63),
    (Square(), 1 / 16, 225),
    (LShape(), 1 / 16, 225 - 64),
    (Slit(), 1 / 16, 225 - 8),
    (Boxes([[[0.0, 0.0], [0.4, 1.0]], [[0.6, 0.0], [1.0, 1.0]]]), 1 / 20, 2 * 7 * 19),
])
def test_rasterized_cell_counts(shape, h, expected_n):
    extent = ((0.0, 1.0),) if shape.ndim == 1 else ((0.0, 1.0), (0.0, 1.0))
    mask = make_domain(shape, GridSpec.nodal(h, extent))
    assert mask.n == expected_n
    assert not mask.unresolved
    assert mask.name == shape.kind


def test_disk_is_symmetric():
    mask = make_domain(Disk(), GridSpec.nodal(1 / 32))
    interior = mask.interior
    assert np.array_equal(interior, interior[::-1])
    assert np.array_equal(interior, interior.T)
    assert is_connected(mask)


def test_annulus_excludes_center():
    mask = make_domain(Annulus(), GridSpec.nodal(1 / 32))
    assert not mask.interior[15, 15]
    assert is_connected(mask)


@pytest.mark.parametrize("level", [0, 1, 2, 3])
def test_koch_vertices(level):
    vertices = koch_vertices(level)
    assert vertices.shape == (3 * 4 ** level, 2)
    # the prefractal keeps the threefold symmetry about its center
    assert np.allclose(vertices.mean(axis=0), [0.5, 0.5])


def test_koch_area_grows_with_level():
    grid = GridSpec.nodal(1 / 64)
    counts = [make_domain(Koch(level), grid).n for level in (0, 1, 2)]
    assert counts[0] < counts[1] < counts[2]


def test_points_in_polygon_square():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    x = np.array([0.5, 1.5, 0.25])
    y = np.array([0.5, 0.5, 0.75])
    assert points_in_polygon(x, y, square).tolist() == [True, False, True]


def test_unresolved_warning():
    with pytest.warns(RoughlogUserWarning, match="does not resolve"):
        mask = make_domain(Cusp(4.0), GridSpec.nodal(1 / 16))
    assert mask.unresolved


def test_empty_shape():
    with pytest.warns(RoughlogUserWarning), pytest.raises(DegenerateDomainError):
        make_domain(Square((0.5, 0.5), (0.51, 0.51)), GridSpec.nodal(1 / 4))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        make_domain(Interval(), GridSpec.nodal(1 / 8))


@pytest.mark.parametrize("shape", [Interval(0.0, 2.0), Square((0, 0), (1, 2)), Disk(radius=0.3),
                                   LShape(0.25), Slit(0.5, 0.75), Koch(2), Cusp(3.0), Annulus(),
                                   Boxes([[[0, 0], [1, 1]]])])
def test_config_round_trip(shape):
    rebuilt = ShapeSpec.from_config(shape.to_config())
    assert type(rebuilt) is type(shape)
    assert rebuilt.to_config() == shape.to_config()


@pytest.mark.parametrize("config", [{}, {"kind": "hexagon"}, {"kind": "disk", "sides": 6},
                                    {"kind": "slit", "length": 1.0}])
def test_from_config_invalid(config):
    with pytest.raises(ValueError):
        ShapeSpec.from_config(config)


def test_make_domain_accepts_config():
    mask = make_domain({"kind": "lshape", "corner": 0.5}, GridSpec.nodal(1 / 16))
    assert mask.n == 225 - 64


@pytest.mark.parametrize("kwargs", [{"position": 0.0}, {"length": 0.0}])
def test_slit_invalid(kwargs):
    with pytest.raises(ValueError):
        Slit(**kwargs)


def test_shape_registry():
    assert set(SHAPES) == {"interval", "square", "disk", "annulus", "lshape", "slit", "koch",
                           "cusp", "boxes"}
