"""
Ordered sub- and supersolutions and the shift ``omega`` of the monotone iteration.
"""
import math
from collections import namedtuple

import numpy as np

from roughlog.assembly.operator import add_potential
from roughlog.assembly.weights import truncate_weight
from roughlog.config import conf
from roughlog.domain.grid import inradius
from roughlog.logger import log
from roughlog.spectral.principal import principal_pair
from roughlog.spectral.threshold import LambdaStarResult, eigenvector_comparison, lambda_star
from roughlog.utils.exceptions import ConvergenceError, PreconditionError
from roughlog.utils.misc import sup_norm

__all__ = ['Subsolution', 'Supersolution', 'SubSuperPair', 'build_subsolution',
           'build_supersolution', 'order_pair', 'pick_omega', 'is_subsolution',
           'is_supersolution']

Subsolution = namedtuple("Subsolution", "epsilon vector")
"""
A positive subsolution ``epsilon * psi``.

epsilon: the scale; ``nan`` when the vector is not a multiple of ``psi``.
vector: one value per cell.
"""

Supersolution = namedtuple("Supersolution", "kappa vector gamma delta mu phi m_delta")
"""
A positive supersolution ``kappa * phi``.

kappa: the scale.
vector: ``kappa * phi``.
gamma: multiplier of the weight.
delta: truncation distance of the weight.
mu: ``lambda_1(A + gamma m_delta)``.
phi: unit principal eigenvector of ``A + gamma m_delta``.
m_delta: the truncated weight.
"""


class SubSuperPair(namedtuple("SubSuperPair",
                              "epsilon sub kappa super gamma delta omega comparison_constant")):
    """
    A certified ordered pair ``0 < sub < super`` and the shift ``omega`` for
    the order interval between them.

    ``comparison_constant`` is the eigenvector comparison constant when it was
    needed for the ordering and ``nan`` otherwise.
    """
    __slots__ = ()

    @property
    def margin(self):
        """
        ``min(super - sub)``.
        """
        return float(np.min(self.super - self.sub))


def _tolerance(problem, u):
    return conf.residual_rtol * (1.0 + problem.residual_scale(u))


def is_subsolution(problem, u):
    """
    ``A u - lambda u + m g(u) u <= 0`` within ``conf.residual_rtol``, per cell.
    """
    return bool(np.all(problem.residual(u) <= _tolerance(problem, u)))


def is_supersolution(problem, u):
    """
    ``A u - lambda u + m g(u) u >= 0`` within ``conf.residual_rtol``, per cell.
    """
    return bool(np.all(problem.residual(u) >= -_tolerance(problem, u)))


def build_subsolution(problem):
    """
    The subsolution ``epsilon * psi`` with ``psi`` the principal eigenvector of ``A``.

    ``epsilon psi`` is a subsolution whenever ``m g(epsilon ||psi||) <= lambda - lambda_1``
    at every cell. The largest such ``epsilon`` is found by inverting ``g`` and
    multiplied by ``conf.safety_factor``; the factor is applied again until the
    residual check passes.

    Returns
    -------
    `Subsolution`

    Raises
    ------
    `~roughlog.utils.exceptions.PreconditionError`
        ``lambda <= lambda_1(A)``: there is no positive subsolution of this form.
    """
    pair = problem.principal
    gap = problem.lam - pair.lambda1
    if gap <= 0:
        raise PreconditionError(f"lambda={problem.lam} does not exceed lambda_1={pair.lambda1}; "
                                "there is no positive subsolution.")
    psi = pair.u
    largest = problem.g.inverse(gap / problem.m.sup) / sup_norm(psi)
    epsilon = conf.safety_factor * largest
    for _ in range(conf.search_cap_log2):
        if is_subsolution(problem, epsilon * psi):
            break
        epsilon *= conf.safety_factor
    else:
        raise ConvergenceError("No verified subsolution found.", diagnostics={"epsilon": epsilon})
    log.debug(f"build_subsolution: epsilon={epsilon:.6g} for gap {gap:.3g}.")
    return Subsolution(float(epsilon), epsilon * psi)


def _resolve_lambda_star(problem, lstar, workers):
    if lstar is None:
        lstar = lambda_star(problem.op, problem.m, workers=workers)
    if isinstance(lstar, LambdaStarResult):
        return lstar.value, lstar.gamma_trace
    return float(lstar), []


def _search_gamma(problem, target, trace):
    for gamma, value in trace:
        if value > target:
            return gamma, value
    gamma = 1.0
    for _ in range(conf.search_cap_log2 + 1):
        value = principal_pair(add_potential(problem.op, problem.m, gamma)).lambda1
        if value > target:
            return gamma, value
        gamma *= 2.0
    raise ConvergenceError(f"lambda_1(gamma m) stays at or below {target:.6g} for gamma up to "
                           f"2**{conf.search_cap_log2}.",
                           diagnostics={"gamma": gamma / 2, "lambda1": value})


def _search_delta(problem, gamma, delta):
    mask = problem.op.mask
    if delta is not None:
        m_delta = truncate_weight(problem.m, mask, delta, warn=False)
        if m_delta.is_zero:
            raise PreconditionError(f"Truncating the weight at delta={delta} leaves nothing.")
        mu = principal_pair(add_potential(problem.op, m_delta, gamma)).lambda1
        if mu <= problem.lam:
            raise PreconditionError(f"lambda_1(gamma m_delta)={mu:.6g} does not exceed "
                                    f"lambda={problem.lam} at delta={delta}.")
        return delta, m_delta, mu
    delta = inradius(mask) / 2
    while True:
        m_delta = truncate_weight(problem.m, mask, delta, warn=False)
        if not m_delta.is_zero:
            mu = principal_pair(add_potential(problem.op, m_delta, gamma)).lambda1
            if mu > problem.lam:
                return delta, m_delta, mu
        if delta == 0:
            raise ConvergenceError("No truncation of the weight lifts lambda_1 above lambda.",
                                   diagnostics={"gamma": gamma})
        # below h/2 the truncation keeps every cell
        delta = delta / 2 if delta / 2 >= mask.h / 4 else 0.0


def build_supersolution(problem, delta=None, lstar=None, workers=None):
    """
    A supersolution ``kappa * phi`` built from a truncated, amplified weight.

    ``gamma`` is doubled until ``lambda_1(A + gamma m)`` exceeds ``lambda`` by a
    margin, ``delta`` is halved from half the inradius until
    ``lambda_1(A + gamma m_delta) > lambda`` and ``kappa`` is doubled until
    ``m g(kappa phi) >= gamma m_delta`` on the support of ``m_delta``.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
    delta : `float`, optional
        Use this truncation distance instead of searching for one.
    lstar : `float` or `~roughlog.spectral.LambdaStarResult`, optional
        A precomputed threshold; computed with `~roughlog.spectral.lambda_star`
        when omitted.
    workers : `int`, optional

    Returns
    -------
    `Supersolution`

    Raises
    ------
    `~roughlog.utils.exceptions.PreconditionError`
        ``lambda`` is at or above the threshold estimate.
    `~roughlog.utils.exceptions.ConvergenceError`
        ``gamma`` or ``kappa`` exceeded ``2**conf.search_cap_log2``.
    """
    lam = problem.lam
    threshold, trace = _resolve_lambda_star(problem, lstar, workers)
    if lam >= threshold:
        raise PreconditionError(f"lambda={lam} is not below the threshold estimate "
                                f"{threshold:.6g}; the weight can not lift lambda_1 above it.")
    margin = 0.1 * (threshold - lam) if np.isfinite(threshold) else 0.1 * (1 + abs(lam))
    gamma, _ = _search_gamma(problem, lam + margin, trace)
    delta, m_delta, _ = _search_delta(problem, gamma, delta)

    eigen = principal_pair(add_potential(problem.op, m_delta, gamma))
    phi = eigen.u
    active = m_delta.values > 0
    required = gamma * m_delta.values[active]
    kappa = 1.0
    for _ in range(conf.search_cap_log2 + 1):
        reached = problem.m.values[active] * problem.g.g(kappa * phi[active])
        if np.all(reached >= required) and is_supersolution(problem, kappa * phi):
            break
        kappa *= 2.0
    else:
        raise ConvergenceError(f"kappa exceeded 2**{conf.search_cap_log2}.",
                               diagnostics={"gamma": gamma, "delta": delta, "mu": eigen.lambda1,
                                            "min_phi": float(phi[active].min())})
    log.debug(f"build_supersolution: gamma={gamma:.6g}, delta={delta:.4g}, kappa={kappa:.6g}, "
              f"mu={eigen.lambda1:.6g}.")
    return Supersolution(kappa, kappa * phi, gamma, delta, eigen.lambda1, phi, m_delta)


def order_pair(problem, sub, sup):
    """
    Certify ``0 < sub < super``, enlarging ``kappa`` when necessary.

    When the ordering fails and ``sub`` is ``epsilon psi``, ``kappa`` is raised to
    ``epsilon c`` with ``c`` the eigenvector comparison constant of
    ``gamma m_delta``. Otherwise, or if that is not enough, ``kappa`` is doubled.
    Doubling keeps ``kappa phi`` a supersolution since ``g`` is increasing.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
    sub : `Subsolution`
    sup : `Supersolution`

    Returns
    -------
    `SubSuperPair`

    Raises
    ------
    `~roughlog.utils.exceptions.ConvergenceError`
        No ordering within ``kappa <= 2**conf.search_cap_log2``.
    """
    if not np.all(sub.vector > 0):
        raise PreconditionError("The subsolution must be strictly positive.")
    kappa, phi = sup.kappa, sup.phi
    comparison = np.nan
    cap = 2.0 ** conf.search_cap_log2
    while kappa <= cap:
        vector = kappa * phi
        if np.all(sub.vector < vector) and is_supersolution(problem, vector):
            break
        if np.isnan(comparison) and np.isfinite(sub.epsilon):
            try:
                comparison = eigenvector_comparison(problem.op, sup.m_delta * sup.gamma)
            except PreconditionError as e:
                log.debug(f"order_pair: no comparison constant ({e}).")
                comparison = np.inf
            if np.isfinite(comparison):
                target = sub.epsilon * comparison * (1 + 1e-9)
                if target > kappa:
                    kappa *= 2.0 ** math.ceil(math.log2(target / kappa))
                    continue
        kappa *= 2.0
    else:
        raise ConvergenceError("The subsolution and supersolution could not be ordered.",
                               diagnostics={"kappa": kappa, "comparison_constant": comparison})
    if kappa != sup.kappa:
        log.debug(f"order_pair: kappa raised from {sup.kappa:.6g} to {kappa:.6g}.")
    super_ = kappa * phi
    omega = pick_omega(problem, sup_norm(super_))
    return SubSuperPair(sub.epsilon, sub.vector, kappa, super_, sup.gamma, sup.delta, omega,
                        float(comparison) if np.isfinite(comparison) else np.nan)


def _cell_omega(problem, k_bound, margin, lower):
    k = np.broadcast_to(np.asarray(k_bound, dtype=float), (problem.n,))
    needed = problem.m.values * problem.g.max_envelope(k) - problem.lam
    return np.maximum(needed, lower) + margin


def pick_omega(problem, k_bound, margin=1.0, lower=0.0):
    """
    The shift making ``F(u) = (omega + A)^-1 (lambda u + omega u - m g(u) u)``
    monotone on ``[0, k_bound]``.

    ``omega`` bounds ``m (g(xi) + g'(xi) xi) - lambda`` over every cell and
    ``xi in [0, k_bound]`` from above, using the sampled envelope of
    `~roughlog.logistic.Nonlinearity.max_envelope`, and is kept above
    ``-lambda_1(A)``.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
    k_bound : `float`
    margin : `float`, optional
        Added to the bound.
    lower : `float`, optional
        The bound is taken no smaller than this before the margin is added.

    Returns
    -------
    `float`
    """
    if k_bound < 0:
        raise ValueError(f"k_bound must be nonnegative, got {k_bound}.")
    omega = float(np.max(_cell_omega(problem, k_bound, margin, lower)))
    floor = -problem.lambda1
    if omega <= floor:
        omega = floor + margin
    return omega
