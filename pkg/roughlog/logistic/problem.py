"""
The discrete logistic problem ``A u = lambda u - m g(u) u``.
"""
import numpy as np
from astropy.utils import lazyproperty

from roughlog.assembly.weights import Weight
from roughlog.logistic.nonlinearity import Nonlinearity
from roughlog.spectral.principal import principal_pair
from roughlog.spectral.threshold import lambda_star
from roughlog.utils.misc import as_cell_vector

__all__ = ['LogisticProblem', 'existence_interval']


class LogisticProblem:
    """
    A logistic equation on the mask of ``op``.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
        Must be a Z-matrix on a connected mask.
    m : `~roughlog.assembly.Weight`
        Nonzero weight on the same mask.
    g : `~roughlog.logistic.Nonlinearity` or `dict`
        A nonlinearity or its configuration.
    lam : `float`
    """

    def __init__(self, op, m, g, lam):
        op.require_positivity("LogisticProblem")
        if not isinstance(m, Weight):
            raise TypeError("m must be a Weight.")
        op.mask.check_same(m.mask, "weight")
        m.require_nonzero("LogisticProblem")
        if not isinstance(g, Nonlinearity):
            g = Nonlinearity.from_config(g)
        if not np.isfinite(lam):
            raise ValueError(f"lambda must be finite, got {lam}.")
        self.op = op
        self.m = m
        self.g = g
        self.lam = float(lam)

    @property
    def n(self):
        return self.op.n

    @lazyproperty
    def principal(self):
        """
        The principal pair of ``A`` (independent of ``lambda``).
        """
        return principal_pair(self.op)

    @property
    def lambda1(self):
        return self.principal.lambda1

    def with_lambda(self, lam):
        """
        The same problem at another ``lambda``, sharing the cached principal pair.
        """
        new = type(self)(self.op, self.m, self.g, lam)
        if "principal" in self.__dict__:
            new.__dict__["principal"] = self.__dict__["principal"]
        return new

    def potential(self, u):
        """
        ``m g(u)``, the frozen potential of ``u``.
        """
        return self.m.values * self.g.g(u)

    def linearized_potential(self, u):
        """
        ``m g(u) + m g'(u) u``.
        """
        return self.m.values * (self.g.g(u) + self.g.dg(u) * u)

    def residual(self, u):
        """
        ``A u - lambda u + m g(u) u`` per cell.
        """
        u = as_cell_vector(u, self.n, "u")
        return self.op.matrix @ u - self.lam * u + self.potential(u) * u

    def residual_scale(self, u):
        """
        Size of the terms making up `residual`, per cell.
        """
        u = as_cell_vector(u, self.n, "u")
        return (abs(self.op.matrix) @ np.abs(u) + abs(self.lam) * np.abs(u)
                + np.abs(self.potential(u) * u))

    def __repr__(self):
        return (f"LogisticProblem(n={self.n}, lambda={self.lam}, g={self.g!r}, "
                f"op={self.op.name!r}, m={self.m.name!r})")


def existence_interval(op, m, schedule=None, workers=None):
    """
    The interval ``(lambda_1(A), lambda*(m))`` of ``lambda`` admitting a positive solution.

    Returns
    -------
    `tuple` of `float`
        The upper end may be ``numpy.inf``.
    """
    lower = principal_pair(op).lambda1
    upper = lambda_star(op, m, schedule=schedule, workers=workers).value
    return lower, upper
