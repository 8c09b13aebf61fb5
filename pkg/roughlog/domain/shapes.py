"""
Shapes that can be rasterized into a `~roughlog.domain.DomainMask`.

Every shape is an open region described by a vectorized membership test on cell
centers. Rough shapes (slit, Koch prefractal, cusp) are the point of the package;
their smallest feature is compared with the grid width so that masks which cannot
resolve the shape are flagged.
"""
import abc
import numbers
import warnings

import numpy as np

from roughlog.domain.grid import DomainMask
from roughlog.logger import log
from roughlog.utils.exceptions import RoughlogUserWarning

__all__ = ['ShapeSpec', 'Interval', 'Square', 'Disk', 'LShape', 'Slit', 'Koch', 'Cusp',
           'Annulus', 'Boxes', 'SHAPES', 'make_domain', 'koch_vertices', 'points_in_polygon']

MAX_KOCH_LEVEL = 5
MAX_CUSP_POWER = 6
RESOLUTION_CELLS = 4


class ShapeSpec(abc.ABC):
    """
    Base class for an open region of R^N, N in {1, 2}.
    """
    kind = None
    ndim = 2

    @abc.abstractmethod
    def contains(self, x, y):
        """
        Boolean array: whether each point ``(x, y)`` lies in the open region.
        """

    @property
    @abc.abstractmethod
    def min_feature(self):
        """
        Width of the thinnest part of the shape, in length units.
        """

    def cut(self, grid, x, y):
        """
        Cells removed by zero-width features such as slits; none by default.
        """
        return np.zeros(np.shape(x), dtype=bool)

    def to_config(self):
        """
        A JSON-ready `dict` that `ShapeSpec.from_config` turns back into this shape.
        """
        params = {key.lstrip('_'): _jsonable(value) for key, value in vars(self).items()}
        return {'kind': self.kind, **params}

    @staticmethod
    def from_config(config):
        """
        Build a shape from a `dict` with a ``kind`` key and the shape's parameters.
        """
        config = dict(config)
        try:
            kind = config.pop('kind')
        except KeyError:
            raise ValueError("A shape needs a 'kind'.")
        if kind not in SHAPES:
            raise ValueError(f"Unknown shape kind {kind!r}; expected one of {sorted(SHAPES)}.")
        try:
            return SHAPES[kind](**config)
        except TypeError as e:
            raise ValueError(f"Invalid parameters for shape {kind!r}: {e}")

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.to_config().items() if k != 'kind')
        return f"{type(self).__name__}({params})"


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    return value


def _pair(value, name):
    value = tuple(float(v) for v in value)
    if len(value) != 2:
        raise ValueError(f"{name} must be a coordinate pair.")
    return value


class Interval(ShapeSpec):
    """
    The open interval ``(lower, upper)`` in 1-D.
    """
    kind = 'interval'
    ndim = 1

    def __init__(self, lower=0.0, upper=1.0):
        if not upper > lower:
            raise ValueError("An interval needs upper > lower.")
        self.lower, self.upper = float(lower), float(upper)

    def contains(self, x, y):
        return (x > self.lower) & (x < self.upper)

    @property
    def min_feature(self):
        return self.upper - self.lower


class Square(ShapeSpec):
    """
    The open axis-aligned box with corners ``lower`` and ``upper``.
    """
    kind = 'square'

    def __init__(self, lower=(0.0, 0.0), upper=(1.0, 1.0)):
        self.lower = _pair(lower, 'lower')
        self.upper = _pair(upper, 'upper')
        if not all(u > l for l, u in zip(self.lower, self.upper)):
            raise ValueError("A square needs upper > lower in every coordinate.")

    def contains(self, x, y):
        return ((x > self.lower[0]) & (x < self.upper[0])
                & (y > self.lower[1]) & (y < self.upper[1]))

    @property
    def min_feature(self):
        return min(u - l for l, u in zip(self.lower, self.upper))


class Disk(ShapeSpec):
    kind = 'disk'

    def __init__(self, center=(0.5, 0.5), radius=0.5):
        self.center = _pair(center, 'center')
        if not radius > 0:
            raise ValueError("A disk needs a positive radius.")
        self.radius = float(radius)

    def contains(self, x, y):
        return (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2 < self.radius ** 2

    @property
    def min_feature(self):
        return 2 * self.radius


class Annulus(ShapeSpec):
    kind = 'annulus'

    def __init__(self, center=(0.5, 0.5), inner=0.2, outer=0.45):
        self.center = _pair(center, 'center')
        if not 0 <= inner < outer:
            raise ValueError("An annulus needs 0 <= inner < outer.")
        self.inner, self.outer = float(inner), float(outer)

    def contains(self, x, y):
        r2 = (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2
        return (r2 > self.inner ** 2) & (r2 < self.outer ** 2)

    @property
    def min_feature(self):
        return self.outer - self.inner


class LShape(ShapeSpec):
    """
    The unit square without the closed upper right corner ``[corner, 1]^2``.
    """
    kind = 'lshape'

    def __init__(self, corner=0.5):
        if not 0 < corner < 1:
            raise ValueError("The L-shape corner must lie in (0, 1).")
        self.corner = float(corner)

    def contains(self, x, y):
        square = (x > 0) & (x < 1) & (y > 0) & (y < 1)
        return square & ((x < self.corner) | (y < self.corner))

    @property
    def min_feature(self):
        return self.corner


class Slit(ShapeSpec):
    """
    The unit square minus the segment ``{x = position, y <= length}``.

    A segment has no area, so cell-center membership alone would miss it. The
    cells whose half-open x-extent ``[x - h/2, x + h/2)`` contains ``position``
    and whose center lies at or below ``length`` are removed instead.
    """
    kind = 'slit'

    def __init__(self, position=0.5, length=0.5):
        if not 0 < position < 1:
            raise ValueError("The slit position must lie in (0, 1).")
        if not 0 < length < 1:
            raise ValueError("The slit length must lie in (0, 1); a full slit separates "
                             "the square.")
        self.position, self.length = float(position), float(length)

    def contains(self, x, y):
        return (x > 0) & (x < 1) & (y > 0) & (y < 1)

    def cut(self, grid, x, y):
        half = grid.h / 2
        return (x - half <= self.position) & (self.position < x + half) & (y <= self.length)

    @property
    def min_feature(self):
        return min(self.position, 1 - self.position, 1 - self.length)


class Cusp(ShapeSpec):
    """
    The outward cusp ``{0 < x < 1, |y - 1/2| < x**power / 2}``.
    """
    kind = 'cusp'

    def __init__(self, power=2.0):
        if not 2 <= power <= MAX_CUSP_POWER:
            raise ValueError(f"The cusp power must lie in [2, {MAX_CUSP_POWER}], got {power}.")
        self.power = float(power)

    def contains(self, x, y):
        xc = np.clip(x, 0, None)
        return (x > 0) & (x < 1) & (np.abs(y - 0.5) < 0.5 * xc ** self.power)

    @property
    def min_feature(self):
        # width at mid-length; the tip itself is never resolved
        return 0.5 ** self.power


def koch_vertices(level, center=(0.5, 0.5), radius=0.45):
    """
    Vertices of the Koch snowflake prefractal of the given level, counter-clockwise.

    Level 0 is the equilateral triangle inscribed in the circle of ``radius``.
    """
    angles = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    pts = np.asarray(center) + radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    c, s = np.cos(np.pi / 3), np.sin(np.pi / 3)
    for _ in range(level):
        p = pts
        d = (np.roll(pts, -1, axis=0) - p) / 3
        a = p + d
        b = p + 2 * d
        # clockwise rotation points outward for a counter-clockwise polygon
        peak = a + np.stack([c * d[:, 0] + s * d[:, 1], -s * d[:, 0] + c * d[:, 1]], axis=1)
        pts = np.stack([p, a, peak, b], axis=1).reshape(-1, 2)
    return pts


def points_in_polygon(x, y, vertices, chunk=4096):
    """
    Even-odd point-in-polygon test, vectorized over points and edges.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    px, py = x.ravel(), y.ravel()
    x0, y0 = vertices[:, 0], vertices[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    inside = np.zeros(px.size, dtype=bool)
    for start in range(0, px.size, chunk):
        qx = px[start:start + chunk, None]
        qy = py[start:start + chunk, None]
        straddle = (y0 > qy) != (y1 > qy)
        with np.errstate(divide='ignore', invalid='ignore'):
            xcross = x0 + (qy - y0) * (x1 - x0) / (y1 - y0)
        crossings = straddle & (qx < xcross)
        inside[start:start + chunk] = np.count_nonzero(crossings, axis=1) % 2 == 1
    return inside.reshape(x.shape)


class Koch(ShapeSpec):
    """
    The interior of a Koch snowflake prefractal.
    """
    kind = 'koch'

    def __init__(self, level=3, center=(0.5, 0.5), radius=0.45):
        if not isinstance(level, numbers.Integral) or not 0 <= level <= MAX_KOCH_LEVEL:
            raise ValueError(f"The Koch level must be an integer in [0, {MAX_KOCH_LEVEL}].")
        self.level = int(level)
        self.center = _pair(center, 'center')
        self.radius = float(radius)
        self._vertices = koch_vertices(self.level, self.center, self.radius)

    def to_config(self):
        return {'kind': self.kind, 'level': self.level, 'center': list(self.center),
                'radius': self.radius}

    def contains(self, x, y):
        return points_in_polygon(x, y, self._vertices)

    @property
    def min_feature(self):
        side = self.radius * np.sqrt(3)
        return side / 3 ** self.level


class Boxes(ShapeSpec):
    """
    A union of open axis-aligned boxes, each given as ``[[x0, y0], [x1, y1]]``.
    """
    kind = 'boxes'

    def __init__(self, boxes):
        self.boxes = [Square(lower, upper) for lower, upper in boxes]
        if not self.boxes:
            raise ValueError("Boxes needs at least one box.")

    def to_config(self):
        return {'kind': self.kind,
                'boxes': [[list(b.lower), list(b.upper)] for b in self.boxes]}

    def contains(self, x, y):
        result = np.zeros(np.shape(x), dtype=bool)
        for box in self.boxes:
            result |= box.contains(x, y)
        return result

    @property
    def min_feature(self):
        return min(box.min_feature for box in self.boxes)


SHAPES = {cls.kind: cls for cls in (Interval, Square, Disk, LShape, Slit, Koch, Cusp,
                                    Annulus, Boxes)}


def make_domain(shape, grid, name=None):
    """
    Rasterize ``shape`` on ``grid`` by cell-center membership.

    Parameters
    ----------
    shape : `ShapeSpec` or `dict`
        A shape or its configuration.
    grid : `~roughlog.domain.GridSpec`

    Returns
    -------
    `~roughlog.domain.DomainMask`
        ``unresolved`` is set, and a `~roughlog.utils.exceptions.RoughlogUserWarning`
        emitted, when fewer than four cells span the smallest feature of the shape.

    Raises
    ------
    `~roughlog.utils.exceptions.DegenerateDomainError`
        No cell center lies in the shape.
    """
    if not isinstance(shape, ShapeSpec):
        shape = ShapeSpec.from_config(shape)
    if shape.ndim != grid.ndim:
        raise ValueError(f"A {shape.ndim}-D shape can not be rasterized on a "
                         f"{grid.ndim}-D grid.")
    x, y = grid.centers()
    interior = shape.contains(x, y) & ~shape.cut(grid, x, y)
    unresolved = shape.min_feature < RESOLUTION_CELLS * grid.h
    if unresolved:
        warnings.warn(f"The grid (h={grid.h}) does not resolve the smallest feature "
                      f"({shape.min_feature:.3g}) of {shape!r}.", RoughlogUserWarning)
    mask = DomainMask(grid, interior, unresolved=unresolved, name=name or shape.kind)
    log.debug(f"Rasterized {shape!r} into {mask.n} cells.")
    return mask
