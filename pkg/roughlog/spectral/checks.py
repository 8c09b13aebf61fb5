"""
Dense property checks of resolvents and principal eigenvectors.
"""
import numpy as np
from scipy import linalg

from roughlog.assembly.operator import add_potential, gershgorin_lower
from roughlog.spectral.principal import principal_pair
from roughlog.utils.parallel import parallel_map
from roughlog.utils.results import CheckResult

__all__ = ['check_spr_identity', 'check_spr_monotone', 'check_eigenvector_uniqueness']


def _default_omega(op):
    return 1.0 + max(0.0, -gershgorin_lower(op))


def _dense_resolvent(op, omega):
    return linalg.inv(op.to_dense() + omega * np.eye(op.n))


def _spectral_radius(matrix):
    return float(np.max(np.abs(linalg.eigvals(matrix))))


def check_spr_identity(op, omega=None, tolerance=1e-8):
    """
    Compare the spectral radius of the dense resolvent with ``1 / (omega + lambda_1)``.

    Returns
    -------
    `~roughlog.utils.results.CheckResult`
        The violation is the relative difference.
    """
    op.require_positivity("check_spr_identity")
    omega = _default_omega(op) if omega is None else float(omega)
    radius = _spectral_radius(_dense_resolvent(op, omega))
    expected = 1.0 / (omega + principal_pair(op).lambda1)
    return CheckResult.from_violation("spr_identity", abs(radius - expected) / expected,
                                      tolerance, omega=omega, n=op.n)


def check_spr_monotone(op, m_low, m_high, omega=None, tolerance=1e-12):
    """
    Strict domination of spectral radii for ordered resolvents.

    With ``m_low <= m_high`` the resolvents ``S = (omega I + A + m_high)^-1`` and
    ``T = (omega I + A + m_low)^-1`` satisfy ``0 <= S <= T``; irreducibility makes
    ``spr(S) < spr(T)`` unless the weights agree.

    Returns
    -------
    `~roughlog.utils.results.CheckResult`
        The violation is ``spr(S) - spr(T)``; the check passes when it is
        negative and ``S <= T`` holds entrywise up to ``tolerance``.
    """
    op.require_positivity("check_spr_monotone")
    if np.any(m_low.values > m_high.values):
        raise ValueError("check_spr_monotone needs m_low <= m_high.")
    omega = _default_omega(op) if omega is None else float(omega)
    S = _dense_resolvent(add_potential(op, m_high), omega)
    T = _dense_resolvent(add_potential(op, m_low), omega)
    entrywise = float(np.max(S - T))
    violation = _spectral_radius(S) - _spectral_radius(T)
    passed = bool(violation < 0 and entrywise <= tolerance and np.min(S) >= -tolerance)
    return CheckResult("spr_monotone", {"omega": omega, "n": op.n, "entrywise": entrywise},
                       violation, tolerance, passed)


def check_eigenvector_uniqueness(op, n_starts=20, seed=0, tolerance=1e-8, workers=None):
    """
    Run inverse iteration from random positive starts and compare the limits.

    Returns
    -------
    `~roughlog.utils.results.CheckResult`
        The violation is the largest Euclidean distance from the first limit.
    """
    seeds = np.random.SeedSequence(seed).generate_state(n_starts)
    vectors = parallel_map(lambda s: principal_pair(op, seed=int(s)).u, seeds, workers)
    violation = max(np.linalg.norm(u - vectors[0]) for u in vectors)
    return CheckResult.from_violation("eigenvector_uniqueness", violation, tolerance,
                                      n_starts=n_starts, seed=seed)
