"""
Nonnegative weights ``m`` and the families used by experiments.
"""
import warnings

import numpy as np

from roughlog.domain.grid import CellSet, interior_truncation
from roughlog.utils.exceptions import PreconditionError, RoughlogUserWarning

__all__ = ['Weight', 'constant_weight', 'indicator_weight', 'bump_weight', 'function_weight',
           'product_weight', 'truncate_weight']


class Weight:
    """
    A nonnegative value per interior cell of a mask.

    A weight that vanishes everywhere is representable (it arises from
    truncation) but flagged through `Weight.is_zero`; operations that need a
    proper weight call `Weight.require_nonzero`.

    Parameters
    ----------
    mask : `~roughlog.domain.DomainMask`
    values : `float` or array-like
    name : `str`, optional
    """

    def __init__(self, mask, values, name=None):
        values = np.asarray(values, dtype=float)
        if values.ndim == 0:
            values = np.full(mask.n, float(values))
        values = values.ravel().copy()
        if values.shape != (mask.n,):
            raise ValueError(f"A weight needs one value per interior cell ({mask.n}), "
                             f"got {values.size}.")
        if not np.all(np.isfinite(values)):
            raise ValueError("Weight values must be finite.")
        if np.any(values < 0):
            raise ValueError(f"Weight values must be nonnegative; the minimum is {values.min()}.")
        values.setflags(write=False)
        self.mask = mask
        self.values = values
        self.name = name

    @property
    def is_zero(self):
        return not np.any(self.values > 0)

    @property
    def sup(self):
        return float(self.values.max())

    @property
    def support(self):
        return CellSet(self.mask, self.values > 0)

    def require_nonzero(self, what="This operation"):
        if self.is_zero:
            raise PreconditionError(f"{what} needs a weight that is positive somewhere.")

    def scaled(self, factor):
        return Weight(self.mask, factor * self.values, name=self.name)

    def __mul__(self, factor):
        return self.scaled(factor)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Weight):
            return NotImplemented
        return self.mask.same_as(other.mask) and np.array_equal(self.values, other.values)

    def __repr__(self):
        return (f"Weight({self.name or ''!s}, n={self.mask.n}, sup={self.sup:.6g}, "
                f"support={self.support.count})")


def constant_weight(mask, value=1.0):
    return Weight(mask, value, name="constant")


def indicator_weight(mask, cells, value=1.0):
    """
    ``value`` on ``cells`` and zero elsewhere.
    """
    mask.check_same(cells.mask, "cell set")
    return Weight(mask, value * cells.members.astype(float), name="indicator")


def bump_weight(mask, center, radius, height=1.0):
    """
    A smooth bump ``height * exp(1 - 1 / (1 - r**2 / radius**2))`` supported in the
    open ball of ``radius`` about ``center``.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    r2 = np.sum((mask.centers[:, :center.size] - center) ** 2, axis=1) / radius ** 2
    values = np.zeros(mask.n)
    inside = r2 < 1
    values[inside] = height * np.exp(1 - 1 / (1 - r2[inside]))
    return Weight(mask, values, name="bump")


def function_weight(mask, func, name=None):
    """
    Evaluate ``func(x, y)`` at the interior cell centers.
    """
    x, y = mask.centers[:, 0], mask.centers[:, 1]
    values = np.broadcast_to(np.asarray(func(x, y), dtype=float), (mask.n,))
    return Weight(mask, values, name=name or getattr(func, "__name__", None))


def product_weight(*weights):
    """
    The pointwise product of weights on one mask.
    """
    if not weights:
        raise ValueError("product_weight needs at least one weight.")
    values = np.ones(weights[0].mask.n)
    for weight in weights:
        weights[0].mask.check_same(weight.mask, "weight")
        values = values * weight.values
    return Weight(weights[0].mask, values, name="product")


def truncate_weight(m, mask, delta, warn=True):
    """
    The truncated weight ``m_delta``: ``m`` on the interior truncation at
    distance ``delta`` and zero elsewhere.

    A result that vanishes identically has `Weight.is_zero` set and, with
    ``warn``, comes with a warning.
    """
    mask.check_same(m.mask, "weight")
    kept = interior_truncation(mask, delta)
    truncated = Weight(mask, np.where(kept.members, m.values, 0.0), name=m.name)
    if warn and truncated.is_zero:
        warnings.warn(f"Truncating the weight at delta={delta} leaves nothing.",
                      RoughlogUserWarning)
    return truncated
