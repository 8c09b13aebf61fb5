"""
Uniform cell grids, rasterized domain masks and sets of interior cells.
"""
import textwrap
from collections import namedtuple

import numpy as np
from astropy.utils import lazyproperty
from scipy import ndimage
from scipy import sparse
from scipy.sparse import csgraph

from roughlog.utils.exceptions import DegenerateDomainError, MaskMismatchError

__all__ = ['GridSpec', 'DomainMask', 'CellSet', 'BoundaryFace', 'DIRECTIONS',
           'is_connected', 'interior_truncation', 'boundary_faces', 'boundary_measure',
           'inradius', 'submask', 'degeneracy_set', 'cells_in_box']


DIRECTIONS = ("-x", "+x", "-y", "+y")
"""
Face directions in the order used by every face enumeration. 1-D masks only use
the first two.
"""

_OFFSETS = {"-x": (-1, 0), "+x": (1, 0), "-y": (0, -1), "+y": (0, 1)}

BoundaryFace = namedtuple("BoundaryFace", "cell direction measure")
"""
A face of an interior cell that borders a non-interior cell.

cell: index of the interior cell.
direction: one of `DIRECTIONS`.
measure: h**(N-1), the staircase approximation of the surface measure.
"""


class GridSpec:
    """
    A uniform grid of square cells.

    Cell ``(i, j)`` has its center at ``origin + ((i + 1/2) h, (j + 1/2) h)``.

    Parameters
    ----------
    nx : `int`
        Number of cells along x.
    ny : `int`, optional
        Number of cells along y. ``1`` makes the grid one dimensional.
    h : `float`
        Cell width.
    origin : `tuple` of `float`, optional
        Lower left corner of the grid.
    """

    def __init__(self, nx, ny=1, h=1.0, origin=(0.0, 0.0)):
        nx, ny = int(nx), int(ny)
        if nx < 1 or ny < 1:
            raise ValueError(f"Cell counts must be at least 1, got nx={nx}, ny={ny}.")
        h = float(h)
        if not h > 0:
            raise ValueError(f"The cell width h must be positive, got {h}.")
        origin = tuple(float(o) for o in origin)
        if len(origin) == 1:
            origin = (origin[0], 0.0)
        if len(origin) != 2:
            raise ValueError("origin must have one or two coordinates.")
        self._nx, self._ny, self._h, self._origin = nx, ny, h, origin

    @classmethod
    def nodal(cls, h, extent=((0.0, 1.0), (0.0, 1.0))):
        """
        A grid whose cell centers are the interior nodes of a uniform mesh of ``extent``.

        The cells adjacent to the box are then at distance ``h`` from its
        boundary, which is where the Dirichlet stencil places its ghost values.
        With ``extent=((0, 1),)`` the grid is one dimensional.
        """
        counts = []
        origin = []
        for lower, upper in extent:
            count = int(round((upper - lower) / h)) - 1
            if count < 1:
                raise ValueError(f"Extent ({lower}, {upper}) is too small for h={h}.")
            counts.append(count)
            origin.append(lower + h / 2)
        if len(counts) == 1:
            return cls(counts[0], 1, h, (origin[0], -h / 2))
        return cls(counts[0], counts[1], h, tuple(origin))

    @property
    def nx(self):
        return self._nx

    @property
    def ny(self):
        return self._ny

    @property
    def h(self):
        return self._h

    @property
    def origin(self):
        return self._origin

    @property
    def ndim(self):
        """
        Spatial dimension N; grids with a single row are one dimensional.
        """
        return 1 if self._ny == 1 else 2

    @property
    def shape(self):
        """
        Array shape ``(ny, nx)`` of per-cell grid arrays.
        """
        return (self._ny, self._nx)

    @property
    def cell_volume(self):
        return self._h ** self.ndim

    @property
    def face_measure(self):
        return self._h ** (self.ndim - 1)

    def centers(self):
        """
        Cell center coordinates as two arrays of shape ``(ny, nx)``.
        """
        x = self._origin[0] + (np.arange(self._nx) + 0.5) * self._h
        y = self._origin[1] + (np.arange(self._ny) + 0.5) * self._h
        return np.meshgrid(x, y)

    def _key(self):
        return (self._nx, self._ny, self._h, self._origin)

    def __eq__(self, other):
        if not isinstance(other, GridSpec):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"GridSpec(nx={self._nx}, ny={self._ny}, h={self._h!r}, "
                f"origin={self._origin!r})")


class DomainMask:
    """
    A rasterized bounded domain: the interior cells of a `GridSpec`.

    Interior cells are numbered ``0 .. n-1`` in row-major grid order. Two
    interior cells are adjacent when they share a face (the 2N-neighbourhood).

    Parameters
    ----------
    grid : `GridSpec`
    interior : array-like of `bool`
        One flag per grid cell, shape ``(ny, nx)``.
    unresolved : `bool`, optional
        Set when the grid is too coarse for the smallest feature of the shape.
    name : `str`, optional
        A label used in reprs and manifests.
    """

    def __init__(self, grid, interior, unresolved=False, name=None):
        interior = np.array(interior, dtype=bool).reshape(grid.shape)
        if not interior.any():
            raise DegenerateDomainError("degenerate domain: the mask has no interior cells.")
        interior.setflags(write=False)
        self._grid = grid
        self._interior = interior
        self.unresolved = bool(unresolved)
        self.name = name
        self._cells = np.flatnonzero(interior.ravel())
        self._index = np.full(interior.size, -1, dtype=np.intp)
        self._index[self._cells] = np.arange(self._cells.size)

    @property
    def grid(self):
        return self._grid

    @property
    def interior(self):
        """
        Read-only boolean array of shape ``(ny, nx)``.
        """
        return self._interior

    @property
    def n(self):
        """
        Number of interior cells.
        """
        return self._cells.size

    @property
    def ndim(self):
        return self._grid.ndim

    @property
    def h(self):
        return self._grid.h

    @property
    def directions(self):
        return DIRECTIONS[:2 * self.ndim]

    @lazyproperty
    def cell_ij(self):
        """
        Integer grid coordinates ``(i, j)`` of each interior cell, shape ``(n, 2)``.
        """
        j, i = np.divmod(self._cells, self._grid.nx)
        return np.stack([i, j], axis=1)

    @lazyproperty
    def centers(self):
        """
        Center coordinates of each interior cell, shape ``(n, 2)``.
        """
        ij = self.cell_ij
        return np.asarray(self._grid.origin) + (ij + 0.5) * self._grid.h

    def neighbor_index(self, di, dj=0):
        """
        Interior index of the cell at grid offset ``(di, dj)`` from every interior cell.

        Returns
        -------
        `numpy.ndarray`
            ``-1`` where the offset cell is outside the grid or not interior.
        """
        ij = self.cell_ij
        i = ij[:, 0] + di
        j = ij[:, 1] + dj
        valid = (i >= 0) & (i < self._grid.nx) & (j >= 0) & (j < self._grid.ny)
        result = np.full(self.n, -1, dtype=np.intp)
        result[valid] = self._index[j[valid] * self._grid.nx + i[valid]]
        return result

    def neighbors(self, direction):
        """
        Interior index of the face neighbour in ``direction``, ``-1`` where there is none.
        """
        return self.neighbor_index(*_OFFSETS[direction])

    @lazyproperty
    def edges(self):
        """
        Interior face pairs ``(k, l)`` per axis, with ``l`` the ``+axis`` neighbour of ``k``.

        Returns
        -------
        `dict`
            Maps ``"x"`` (and ``"y"`` in 2-D) to integer arrays of shape ``(m, 2)``.
        """
        result = {}
        for axis, direction in zip("xy"[:self.ndim], ("+x", "+y")):
            right = self.neighbors(direction)
            left = np.flatnonzero(right >= 0)
            result[axis] = np.stack([left, right[left]], axis=1)
        return result

    @lazyproperty
    def adjacency(self):
        """
        Symmetric 0/1 adjacency matrix of the interior cells in CSR format.
        """
        pairs = np.concatenate(list(self.edges.values()), axis=0)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.ones(rows.size)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @lazyproperty
    def component_id(self):
        """
        Connected-component label of each interior cell.
        """
        _, labels = csgraph.connected_components(self.adjacency, directed=False)
        return labels

    @lazyproperty
    def exterior_distance(self):
        """
        Euclidean distance from each interior cell center to the nearest non-interior
        cell center, treating everything outside the grid as exterior.
        """
        if self.ndim == 1:
            padded = np.pad(self._interior[0], 1)
            dist = ndimage.distance_transform_edt(padded, sampling=self._grid.h)[1:-1]
            return dist[self._cells]
        padded = np.pad(self._interior, 1)
        dist = ndimage.distance_transform_edt(padded, sampling=self._grid.h)[1:-1, 1:-1]
        return dist.ravel()[self._cells]

    def to_grid(self, values, fill=np.nan):
        """
        Scatter a per-cell vector onto a ``(ny, nx)`` grid array.
        """
        out = np.full(self._interior.size, fill, dtype=np.result_type(values, float))
        out[self._cells] = values
        return out.reshape(self._grid.shape)

    def from_grid(self, array):
        """
        Gather the interior entries of a ``(ny, nx)`` grid array.
        """
        return np.asarray(array).reshape(-1)[self._cells]

    def same_as(self, other):
        return self is other or self == other

    def check_same(self, other, what="object"):
        if not self.same_as(other):
            raise MaskMismatchError(f"The {what} is defined on a different domain mask.")

    def __eq__(self, other):
        if not isinstance(other, DomainMask):
            return NotImplemented
        return self._grid == other._grid and np.array_equal(self._interior, other._interior)

    def __hash__(self):
        return hash((self._grid, self._interior.tobytes()))

    def __str__(self):
        return textwrap.dedent(f"""\
            DomainMask {self.name or ''}
            ----------
            Grid: {self._grid!r}
            Dimension: {self.ndim}
            Interior cells: {self.n}
            Connected: {is_connected(self)}
            Unresolved features: {self.unresolved}""")

    def __repr__(self):
        return f"{object.__repr__(self)}\n{str(self)}"


class CellSet:
    """
    A subset of the interior cells of a `DomainMask`.

    Parameters
    ----------
    mask : `DomainMask`
    members : array-like of `bool`
        One flag per interior cell.
    """

    def __init__(self, mask, members):
        members = np.array(members, dtype=bool).ravel()
        if members.shape != (mask.n,):
            raise ValueError(f"members must have one flag per interior cell ({mask.n}).")
        members.setflags(write=False)
        self._mask = mask
        self._members = members

    @classmethod
    def full(cls, mask):
        return cls(mask, np.ones(mask.n, dtype=bool))

    @classmethod
    def empty(cls, mask):
        return cls(mask, np.zeros(mask.n, dtype=bool))

    @property
    def mask(self):
        return self._mask

    @property
    def members(self):
        return self._members

    @property
    def indices(self):
        return np.flatnonzero(self._members)

    @property
    def count(self):
        return int(self._members.sum())

    def is_empty(self):
        return not self._members.any()

    def _other(self, other):
        if not isinstance(other, CellSet):
            raise TypeError("CellSet operations need another CellSet.")
        self._mask.check_same(other._mask, "cell set")
        return other._members

    def union(self, other):
        return CellSet(self._mask, self._members | self._other(other))

    def intersection(self, other):
        return CellSet(self._mask, self._members & self._other(other))

    def complement(self):
        return CellSet(self._mask, ~self._members)

    def issubset(self, other):
        return bool(np.all(~self._members | self._other(other)))

    __or__ = union
    __and__ = intersection
    __invert__ = complement
    __le__ = issubset

    def __len__(self):
        return self.count

    def __contains__(self, cell):
        return bool(self._members[cell])

    def __eq__(self, other):
        if not isinstance(other, CellSet):
            return NotImplemented
        return self._mask.same_as(other._mask) and np.array_equal(self._members, other._members)

    def __repr__(self):
        return f"CellSet({self.count} of {self._mask.n} cells)"


def is_connected(mask):
    """
    Whether all interior cells of ``mask`` form a single connected component.

    On the discrete level this is irreducibility of every resolvent of an
    operator assembled on the mask.
    """
    return bool(np.all(mask.component_id == mask.component_id[0]))


def interior_truncation(mask, delta):
    """
    The interior cells farther than ``delta`` from the complement of the domain.

    A cell belongs to the truncation when the distance from its center to the
    nearest exterior cell center exceeds ``delta + h/2``; the ``h/2`` slack keeps
    the truncation strictly inside the domain.

    Parameters
    ----------
    mask : `DomainMask`
    delta : `float`
        Non-negative truncation distance.

    Returns
    -------
    `CellSet`
    """
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}.")
    return CellSet(mask, mask.exterior_distance > delta + mask.h / 2)


def inradius(mask):
    """
    Smallest ``delta`` for which `interior_truncation` is empty.
    """
    return float(mask.exterior_distance.max() - mask.h / 2)


def _boundary_face_arrays(mask):
    cells, codes = [], []
    for code, direction in enumerate(mask.directions):
        missing = np.flatnonzero(mask.neighbors(direction) < 0)
        cells.append(missing)
        codes.append(np.full(missing.size, code))
    cells = np.concatenate(cells)
    codes = np.concatenate(codes)
    order = np.lexsort((codes, cells))
    return cells[order], codes[order]


def boundary_faces(mask):
    """
    Every face of an interior cell that borders a non-interior cell.

    Faces are ordered by cell and then by direction (see `DIRECTIONS`); Robin
    coefficients given per face follow this order.

    Returns
    -------
    `list` of `BoundaryFace`
    """
    cells, codes = _boundary_face_arrays(mask)
    measure = mask.grid.face_measure
    return [BoundaryFace(int(c), DIRECTIONS[d], measure) for c, d in zip(cells, codes)]


def boundary_measure(mask):
    """
    Total staircase measure of the boundary faces.
    """
    return _boundary_face_arrays(mask)[0].size * mask.grid.face_measure


def submask(mask, cells, name=None):
    """
    Restrict ``mask`` to the cells in ``cells``.

    The result lives on the same grid; its cells are renumbered.
    """
    mask.check_same(cells.mask, "cell set")
    interior = mask.to_grid(cells.members, fill=False).astype(bool)
    return DomainMask(mask.grid, interior, unresolved=mask.unresolved, name=name)


def degeneracy_set(weight):
    """
    The zero set of a weight: cells where ``m = 0``.
    """
    return CellSet(weight.mask, np.asarray(weight.values) == 0)


def cells_in_box(mask, lower, upper):
    """
    The interior cells whose centers lie in the open box ``(lower, upper)``.

    In 1-D ``lower`` and ``upper`` may be scalars.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    centers = mask.centers[:, :lower.size]
    inside = np.all((centers > lower) & (centers < upper), axis=1)
    return CellSet(mask, inside)
