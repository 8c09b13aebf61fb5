"""
Principal eigenpairs of Z-matrix operators and their spectral gaps.
"""
import warnings
from collections import namedtuple
from pathlib import Path

import numpy as np
from astropy.table import Table
from scipy import linalg

from roughlog.assembly.operator import add_potential, gershgorin_lower
from roughlog.config import conf
from roughlog.logger import log
from roughlog.spectral.resolvent import Resolvent
from roughlog.utils import io
from roughlog.utils.exceptions import ConvergenceError, RoughlogUserWarning

__all__ = ['PrincipalPair', 'GapReport', 'principal_pair', 'lambda1_weight', 'spectral_gap',
           'write_eigenvector']


class PrincipalPair(namedtuple("PrincipalPair", "lambda1 u residual iterations")):
    """
    The principal eigenvalue and its strictly positive, unit-norm eigenvector.

    Parameters
    ----------
    lambda1 : `float`
    u : `numpy.ndarray`
    residual : `float`
        ``||A u - lambda1 u||_2``.
    iterations : `int`
    """
    __slots__ = ()

    @property
    def sup_norm(self):
        return float(self.u.max())


GapReport = namedtuple("GapReport", "gap lambda1 second near_degenerate")
"""
Result of `spectral_gap`.

gap: smallest real part of the non-principal eigenvalues minus ``lambda1``.
lambda1: the principal eigenvalue.
second: the non-principal eigenvalue with the smallest real part.
near_degenerate: whether ``gap <= conf.gap_tol``.
"""


def _residual_tolerance(scale, lam):
    return conf.eig_residual_tol * max(1.0, abs(lam)) + 64 * np.finfo(float).eps * scale


def principal_pair(op, start=None, seed=None):
    """
    The principal eigenpair of ``op`` by shifted inverse iteration.

    Iterating ``(omega I + A)^-1`` from a positive vector keeps every iterate
    strictly positive. The shift starts at ``1 + max(0, -g)`` with ``g`` the
    Gershgorin lower bound and then follows the Collatz-Wielandt lower bound
    ``min (Au)_i / u_i <= lambda_1`` so that ``omega + lambda_1`` stays positive
    while the iteration accelerates. Nonsymmetric operators iterate the left
    eigenvector alongside and use the two-sided quotient.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    start : array-like, optional
        Positive start vector; defaults to a constant.
    seed : `int`, optional
        Draw a random positive start vector from this seed instead.

    Returns
    -------
    `PrincipalPair`

    Raises
    ------
    `~roughlog.utils.exceptions.PositivityRequiredError`
        ``op`` is not a Z-matrix or its mask is not connected.
    `~roughlog.utils.exceptions.ConvergenceError`
        No convergence within ``conf.eig_max_iter`` steps.
    """
    op.require_positivity("principal_pair")
    n = op.n
    matrix = op.matrix
    scale = float(abs(matrix).sum(axis=1).max())
    if start is not None:
        u = np.asarray(start, dtype=float).copy()
        if u.shape != (n,) or not np.all(u > 0):
            raise ValueError("The start vector must be strictly positive with one entry per cell.")
    elif seed is not None:
        u = np.random.default_rng(seed).uniform(0.1, 1.0, n)
    else:
        u = np.ones(n)
    u /= np.linalg.norm(u)
    v = u.copy()

    omega = 1.0 + max(0.0, -gershgorin_lower(op))
    resolvent = Resolvent(op, omega)
    lam_prev = np.inf
    residual = np.inf
    for iteration in range(1, conf.eig_max_iter + 1):
        u = resolvent.solve(u, backward=True)
        u /= np.linalg.norm(u)
        Au = matrix @ u
        if op.symmetric:
            lam = float(u @ Au)
        else:
            v = resolvent.solve(v, transpose=True, backward=True)
            v /= np.linalg.norm(v)
            lam = float(v @ Au / (v @ u))
        residual = float(np.linalg.norm(Au - lam * u))
        tol = _residual_tolerance(scale, lam)
        change_tol = conf.eig_rtol * max(1.0, abs(lam)) + 64 * np.finfo(float).eps * scale
        if abs(lam - lam_prev) <= change_tol and residual <= tol:
            break
        lam_prev = lam
        if np.all(u > 0):
            ratios = Au / u
            lower, upper = float(ratios.min()), float(ratios.max())
            theta = max(upper - lower, 1e-6 * (1 + abs(lam)))
            if -lower + theta < omega - 0.75 * (omega + lower):
                omega = -lower + theta
                resolvent = Resolvent(op, omega)
    else:
        raise ConvergenceError(f"Inverse iteration did not converge in {conf.eig_max_iter} "
                               f"steps (residual {residual:.3e}).", residual=residual,
                               diagnostics={"lambda1": lam, "omega": omega})
    if u.sum() < 0:
        u = -u
    if not np.all(u > 0):
        raise ConvergenceError("The computed principal eigenvector is not strictly positive; "
                               f"its minimum is {u.min():.3e}.", residual=residual,
                               diagnostics={"lambda1": lam})
    log.debug(f"principal_pair: lambda1={lam:.12g} after {iteration} steps, "
              f"residual {residual:.2e}.")
    return PrincipalPair(lam, u, residual, iteration)


def lambda1_weight(op, m, scale=1.0):
    """
    The principal eigenvalue of ``A + scale * m``.
    """
    return principal_pair(add_potential(op, m, scale)).lambda1


def spectral_gap(op):
    """
    Distance from the principal eigenvalue to the rest of the spectrum.

    A dense eigensolve; the gap is the smallest real part among the other
    eigenvalues minus ``lambda1``.

    Returns
    -------
    `GapReport`
        A gap at or below ``conf.gap_tol`` is flagged as near-degenerate and
        reported with a `~roughlog.utils.exceptions.RoughlogUserWarning`.

    Raises
    ------
    `~roughlog.utils.exceptions.DenseCapError`
    `~roughlog.utils.exceptions.PositivityRequiredError`
    """
    op.require_positivity("spectral_gap")
    dense = op.to_dense()
    eigvals = linalg.eigvals(dense)
    principal = int(np.argmin(eigvals.real))
    lambda1 = float(eigvals[principal].real)
    rest = np.delete(eigvals, principal)
    if rest.size == 0:
        return GapReport(np.inf, lambda1, None, False)
    second = rest[np.argmin(rest.real)]
    second = float(second.real) if second.imag == 0 else complex(second)
    gap = float(np.min(rest.real) - lambda1)
    near_degenerate = gap <= conf.gap_tol
    if near_degenerate:
        warnings.warn(f"The principal eigenvalue {lambda1} is near-degenerate: gap {gap:.3e}.",
                      RoughlogUserWarning)
    return GapReport(gap, lambda1, second, near_degenerate)


def write_eigenvector(pair, mask, path):
    """
    Write an eigenvector as ``cell,value`` CSV with the mask alongside as ``<path>.mask``.
    """
    path = Path(path)
    io.write_table(Table({"cell": np.arange(pair.u.size), "value": pair.u}), path)
    io.write_mask(mask, path.with_suffix(".mask"))
