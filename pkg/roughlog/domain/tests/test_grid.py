import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from roughlog.assembly import Weight
from roughlog.domain import (CellSet, DomainMask, GridSpec, boundary_faces, boundary_measure,
                             cells_in_box, degeneracy_set, inradius, interior_truncation,
                             is_connected, submask)
from roughlog.tests.helpers import assert_masks_equal, interval_mask, square_mask
from roughlog.utils.exceptions import DegenerateDomainError, MaskMismatchError
from roughlog.utils.io import read_mask, write_mask


@pytest.mark.parametrize("h, extent, expected_shape", [
    (1 / 16, ((0, 1), (0, 1)), (15, 15)),
    (1 / 64, ((0, 1),), (1, 63)),
    (1 / 64, ((0, 0.45), (0, 0.45)), (28, 28)),
])
def test_nodal_grid_shape(h, extent, expected_shape):
    grid = GridSpec.nodal(h, extent)
    assert grid.shape == expected_shape
    assert grid.ndim == len(extent)


def test_nodal_grid_centers_are_interior_nodes():
    grid = GridSpec.nodal(0.25)
    x, y = grid.centers()
    assert_allclose(x[0], [0.25, 0.5, 0.75])
    assert_allclose(y[:, 0], [0.25, 0.5, 0.75])


def test_nodal_grid_too_small():
    with pytest.raises(ValueError):
        GridSpec.nodal(1.0, ((0, 1),))


@pytest.mark.parametrize("nx, ny, h", [(0, 1, 1.0), (3, 3, 0.0), (3, 3, -1.0)])
def test_grid_invalid(nx, ny, h):
    with pytest.raises(ValueError):
        GridSpec(nx, ny, h)


def test_empty_mask_is_degenerate():
    with pytest.raises(DegenerateDomainError):
        DomainMask(GridSpec(3, 3, 0.1), np.zeros((3, 3), dtype=bool))


def test_numbering_is_row_major():
    interior = np.array([[True, False, True],
                         [True, True, False]])
    mask = DomainMask(GridSpec(3, 2, 1.0), interior)
    assert mask.n == 4
    assert_array_equal(mask.cell_ij, [[0, 0], [2, 0], [0, 1], [1, 1]])
    assert_array_equal(mask.neighbors("+x"), [-1, -1, 3, -1])
    assert_array_equal(mask.neighbors("+y"), [2, -1, -1, -1])


def test_to_grid_round_trip(square_16):
    values = np.arange(square_16.n, dtype=float)
    assert_array_equal(square_16.from_grid(square_16.to_grid(values)), values)


def test_connectivity(square_16, slit_16, two_squares):
    assert is_connected(square_16)
    assert is_connected(slit_16)
    assert not is_connected(two_squares)
    assert len(np.unique(two_squares.component_id)) == 2


def count_components(interior):
    """
    Number of face-connected components of a boolean array, by union-find.
    """
    parent = {cell: cell for cell in zip(*np.nonzero(interior))}

    def find(cell):
        while parent[cell] != cell:
            parent[cell] = parent[parent[cell]]
            cell = parent[cell]
        return cell

    for (i, j) in parent:
        for neighbour in ((i + 1, j), (i, j + 1)):
            if neighbour in parent:
                parent[find(neighbour)] = find((i, j))
    return len({find(cell) for cell in parent})


def test_connectivity_random_masks(rng):
    grid = GridSpec(8, 8, 1 / 9)
    checked = 0
    while checked < 100:
        interior = rng.uniform(size=grid.shape) < 0.6
        if not interior.any():
            continue
        mask = DomainMask(grid, interior)
        components = count_components(interior)
        assert is_connected(mask) == (components == 1)
        assert len(np.unique(mask.component_id)) == components
        checked += 1


def test_slit_removes_cells(slit_16):
    assert slit_16.n == 15 * 15 - 8


def test_interior_truncation(square_16):
    h = square_16.h
    assert interior_truncation(square_16, 0).count == square_16.n
    assert interior_truncation(square_16, h / 4).count == square_16.n
    # exterior centers sit at distance h from the outermost ring
    assert interior_truncation(square_16, h).count == 13 * 13
    assert interior_truncation(square_16, inradius(square_16)).is_empty()


def test_interior_truncation_negative(square_16):
    with pytest.raises(ValueError):
        interior_truncation(square_16, -0.1)


@pytest.mark.parametrize("shape", ["lshape", "random"])
def test_interior_truncation_shrinks(shape, lshape_16, rng):
    if shape == "lshape":
        mask = lshape_16
    else:
        mask = DomainMask(GridSpec(16, 16, 1 / 17), rng.uniform(size=(16, 16)) < 0.8)
    deltas = np.linspace(0, inradius(mask) + mask.h, 12)
    truncations = [interior_truncation(mask, d) for d in deltas]
    for larger, smaller in zip(truncations[:-1], truncations[1:]):
        assert smaller <= larger
    assert truncations[0].count == mask.n
    assert truncations[-1].is_empty()


def test_inradius_square(square_16):
    assert_allclose(inradius(square_16), 0.5 - square_16.h / 2)


def test_boundary_faces(square_16, interval_64):
    faces = boundary_faces(square_16)
    assert len(faces) == 4 * 15
    assert faces[0].cell == 0
    assert faces[0].direction == "-x"
    assert_allclose(boundary_measure(square_16), 4 * 15 / 16)
    assert len(boundary_faces(interval_64)) == 2
    assert boundary_measure(interval_64) == 2


def test_cellset_algebra(square_16):
    left = cells_in_box(square_16, (0, 0), (0.5, 1))
    bottom = cells_in_box(square_16, (0, 0), (1, 0.5))
    assert (left & bottom).count == 7 * 7
    assert (left | bottom).count == 15 * 15 - 8 * 8
    assert (~left).count == square_16.n - left.count
    assert (left & bottom) <= left
    assert not left <= bottom
    assert CellSet.full(square_16) == ~CellSet.empty(square_16)


def test_cellset_mask_mismatch(square_16, square_32):
    with pytest.raises(MaskMismatchError):
        CellSet.full(square_16) | CellSet.full(square_32)


def test_submask_and_degeneracy_set(square_16):
    inside = cells_in_box(square_16, (0.25, 0.25), (0.75, 0.75))
    sub = submask(square_16, inside)
    assert sub.n == 7 * 7
    assert sub.grid == square_16.grid
    m = Weight(square_16, np.where(inside.members, 0.0, 1.0))
    assert degeneracy_set(m) == inside


def test_interval_cells_in_box(interval_64):
    cells = cells_in_box(interval_64, 0.5, 1.0)
    assert cells.count == 31


def test_mask_text_round_trip(tmp_path, slit_16):
    path = tmp_path / "slit.mask"
    write_mask(slit_16, path)
    lines = path.read_text().splitlines()
    assert lines[0].split()[:2] == ["15", "15"]
    assert len(lines) == 16
    assert_masks_equal(read_mask(path), slit_16)


def test_read_mask_invalid(tmp_path):
    path = tmp_path / "bad.mask"
    path.write_text("3 2 0.5 0 0\n101\n")
    with pytest.raises(ValueError):
        read_mask(path)


def test_mask_equality_and_hash():
    assert square_mask(1 / 8) == square_mask(1 / 8)
    assert hash(square_mask(1 / 8)) == hash(square_mask(1 / 8))
    assert square_mask(1 / 8) != interval_mask(1 / 8)
