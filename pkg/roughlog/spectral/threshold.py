"""
The degenerate threshold ``lambda*(m)``, the eigenvector comparison constant and the
continuity probe along truncated weights.
"""
from collections import namedtuple

import numpy as np
from astropy.table import Table

from roughlog.assembly.operator import add_potential
from roughlog.assembly.weights import truncate_weight
from roughlog.config import conf
from roughlog.logger import log
from roughlog.spectral.principal import principal_pair
from roughlog.utils import io
from roughlog.utils.exceptions import PreconditionError
from roughlog.utils.misc import geometric_schedule
from roughlog.utils.parallel import parallel_map

__all__ = ['LambdaStarResult', 'default_gamma_schedule', 'lambda_star',
           'eigenvector_comparison', 'weight_continuity_probe', 'support_touches_boundary']


def default_gamma_schedule():
    """
    ``gamma_k = 2**k`` for ``k = 0 .. 30``.
    """
    return geometric_schedule(1.0, 2.0, 31)


class LambdaStarResult(namedtuple("LambdaStarResult",
                                  "value gamma_trace extrapolated converged")):
    """
    The limit of ``lambda_1(A + gamma m)`` as ``gamma`` grows.

    Parameters
    ----------
    value : `float`
        The threshold, or ``numpy.inf`` when the trace diverges.
    gamma_trace : `list` of `tuple`
        ``(gamma, lambda_1(gamma m))`` along the schedule.
    extrapolated : `bool`
        Whether ``value`` is an Aitken extrapolation of the trace.
    converged : `bool`
        Whether the last increments fell below ``conf.lstar_tol``.
    """
    __slots__ = ()

    @property
    def is_infinite(self):
        return bool(np.isinf(self.value))

    def to_table(self):
        gammas, values = zip(*self.gamma_trace)
        return Table({"gamma": np.array(gammas), "lambda1": np.array(values)})

    def write(self, path):
        """
        Write the trace as ``gamma,lambda1`` CSV.
        """
        io.write_table(self.to_table(), path)


def _aitken(x0, x1, x2):
    d1, d2 = x1 - x0, x2 - x1
    denom = d2 - d1
    if d1 <= 0 or d2 <= 0 or d2 >= d1 or denom == 0:
        return None
    return x2 - d2 ** 2 / denom


def lambda_star(op, m, schedule=None, workers=None):
    """
    Estimate ``lambda*(m) = lim lambda_1(A + gamma m)`` along a schedule of ``gamma``.

    The threshold is infinite when the last increment of the trace exceeds
    ``conf.lstar_divergence``; it is converged when three successive increments
    fall below ``conf.lstar_tol * (1 + |lambda_1|)``. A finite value is the
    Aitken extrapolation of the last three trace entries when the increments
    decay, and never less than the last entry.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    m : `~roughlog.assembly.Weight`
    schedule : sequence of `float`, optional
        Increasing values of ``gamma``; defaults to `default_gamma_schedule`.
    workers : `int`, optional
        Passed to `~roughlog.utils.parallel.parallel_map`.

    Returns
    -------
    `LambdaStarResult`
    """
    m.require_nonzero("lambda_star")
    op.mask.check_same(m.mask, "weight")
    schedule = default_gamma_schedule() if schedule is None else [float(g) for g in schedule]
    if len(schedule) < 2 or np.any(np.diff(schedule) <= 0):
        raise ValueError("The gamma schedule must hold at least two increasing values.")
    values = np.array(parallel_map(lambda g: principal_pair(add_potential(op, m, g)).lambda1,
                                   schedule, workers))
    # lambda_1 is monotone in gamma; enforce it against roundoff in the last digits
    monotone = np.maximum.accumulate(values)
    if np.any(monotone - values > 1e3 * conf.eig_rtol * (1 + np.abs(values))):
        log.warning("lambda_1 decreased along the gamma schedule beyond roundoff.")
    values = monotone
    trace = list(zip(schedule, values.tolist()))
    increments = np.diff(values)
    last = float(values[-1])

    if increments[-1] > conf.lstar_divergence:
        log.info(f"lambda_star: diverges (last increment {increments[-1]:.3g}).")
        return LambdaStarResult(np.inf, trace, False, False)

    converged = (increments.size >= 3
                 and bool(np.all(increments[-3:] <= conf.lstar_tol * (1 + abs(last)))))
    value, extrapolated = last, False
    if values.size >= 3:
        aitken = _aitken(*values[-3:])
        if aitken is not None and np.isfinite(aitken):
            value, extrapolated = max(aitken, last), True
    log.info(f"lambda_star = {value:.10g} (converged={converged}, extrapolated={extrapolated}).")
    return LambdaStarResult(float(value), trace, extrapolated, converged)


def support_touches_boundary(m):
    """
    Whether a cell of the support of ``m`` has a boundary face.
    """
    mask = m.mask
    support = m.values > 0
    for direction in mask.directions:
        if np.any(support & (mask.neighbors(direction) < 0)):
            return True
    return False


def eigenvector_comparison(op, m):
    """
    The smallest ``c`` with ``u_0 <= c u_m``.

    ``u_0`` and ``u_m`` are the unit principal eigenvectors of ``A`` and
    ``A + m``. For weights supported away from the boundary the constant is
    finite.

    Returns
    -------
    `float`

    Raises
    ------
    `~roughlog.utils.exceptions.PreconditionError`
        The support of ``m`` reaches a cell with a boundary face.
    """
    op.mask.check_same(m.mask, "weight")
    if support_touches_boundary(m):
        raise PreconditionError("The weight must have compact support inside the domain; "
                                "its support reaches the boundary layer.")
    u0 = principal_pair(op).u
    um = principal_pair(add_potential(op, m)).u
    return float(np.max(u0 / um))


def weight_continuity_probe(op, m, deltas, workers=None):
    """
    Principal eigenpairs along the truncated weights ``m_delta`` as ``delta`` decreases.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    m : `~roughlog.assembly.Weight`
    deltas : sequence of `float`
        Nonincreasing, ending at ``0`` for the untruncated weight.

    Returns
    -------
    `~astropy.table.Table`
        Columns ``delta``, ``lambda1`` and ``vector_distance``, the Euclidean
        distance of each eigenvector from that of the untruncated weight.
    """
    op.mask.check_same(m.mask, "weight")
    deltas = [float(d) for d in deltas]
    if any(d < 0 for d in deltas) or np.any(np.diff(deltas) > 0):
        raise ValueError("deltas must be nonnegative and nonincreasing.")
    if not deltas or deltas[-1] != 0:
        raise ValueError("deltas must end at 0, the untruncated weight.")
    weights = [truncate_weight(m, op.mask, d) for d in deltas]
    pairs = parallel_map(lambda w: principal_pair(add_potential(op, w)), weights, workers)
    reference = principal_pair(add_potential(op, m)).u
    return Table({"delta": np.array(deltas),
                  "lambda1": np.array([p.lambda1 for p in pairs]),
                  "vector_distance": np.array([np.linalg.norm(p.u - reference) for p in pairs])})
