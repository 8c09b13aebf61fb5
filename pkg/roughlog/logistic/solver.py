"""
The monotone fixed point iteration and the certificates attached to its solutions.
"""
from collections import namedtuple
from pathlib import Path

import numpy as np
from astropy.table import Table
from scipy import sparse
from scipy.sparse import linalg as spla

from roughlog.assembly.operator import add_potential
from roughlog.config import conf
from roughlog.logger import log
from roughlog.logistic.construction import (_cell_omega, build_subsolution,
                                            build_supersolution, order_pair, pick_omega)
from roughlog.semigroup.evolution import Stepper, evolve
from roughlog.spectral.principal import principal_pair
from roughlog.spectral.resolvent import Resolvent
from roughlog.utils import io
from roughlog.utils.exceptions import (ConvergenceError, MonotonicityError, PreconditionError,
                                       UniquenessError)
from roughlog.utils.misc import as_cell_vector, sup_norm

__all__ = ['LogisticSolution', 'SolutionReport', 'NewtonResult', 'iteration_map', 'monotone_solve',
           'solve_logistic', 'verify_solution', 'stability_margin', 'zero_state_margin',
           'damped_newton', 'decay_probe']

# omega is re-picked from the current upper iterate this often
_REPICK_EVERY = 10


class LogisticSolution(namedtuple("LogisticSolution",
                                  "u lam iterations_above iterations_below residual "
                                  "stability_margin pev_gap agreement")):
    """
    A positive solution of the logistic equation.

    Parameters
    ----------
    u : `numpy.ndarray`
    lam : `float`
    iterations_above, iterations_below : `int`
        Steps taken from the supersolution and from the subsolution.
    residual : `float`
        ``||A u - lambda u + m g(u) u||_inf``.
    stability_margin : `float`
        See `stability_margin`.
    pev_gap : `float`
        ``|lambda - lambda_1(A + m g(u))|``.
    agreement : `float`
        Sup-norm distance between the limits from above and below.
    """
    __slots__ = ()

    @property
    def sup_norm(self):
        return sup_norm(self.u)

    @property
    def iterations(self):
        return max(self.iterations_above, self.iterations_below)

    def write(self, mask, path):
        """
        Write ``u`` as ``cell,value`` CSV with the mask alongside as ``<path>.mask``.
        """
        path = Path(path)
        io.write_table(Table({"cell": np.arange(self.u.size), "value": self.u}), path)
        io.write_mask(mask, path.with_suffix(".mask"))


class SolutionReport(namedtuple("SolutionReport",
                                "residual residual_pass pev_gap pev_pass "
                                "semigroup_violation semigroup_pass")):
    """
    Result of `verify_solution`, one value and one pass flag per certificate.
    """
    __slots__ = ()

    @property
    def passed(self):
        return bool(self.residual_pass and self.pev_pass and self.semigroup_pass)


NewtonResult = namedtuple("NewtonResult", "u iterations residual")


def _map(problem, resolvent, omega, u):
    m, g = problem.m.values, problem.g
    return resolvent.solve((problem.lam + omega) * u - m * g.g(u) * u)


def iteration_map(problem, omega):
    """
    The fixed point map ``F(u) = (omega + A)^-1 (lambda u + omega u - m g(u) u)``.

    ``F`` is order preserving on ``[0, k]`` when ``omega`` is at least
    ``pick_omega(problem, k)``.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
    omega : `float`
        Must exceed ``-lambda_1(A)``.

    Returns
    -------
    callable
        ``F`` acting on cell vectors, with ``omega + A`` factorized once.
    """
    if not omega > -problem.lambda1:
        raise PreconditionError(f"omega={omega} does not exceed -lambda_1={-problem.lambda1}.")
    resolvent = Resolvent(problem.op, omega)

    def apply(u):
        return _map(problem, resolvent, omega, as_cell_vector(u, problem.n, "u"))

    return apply


def _slack(problem, omega, upper, u):
    # rounding in the solve is amplified by at most rhs size / (lambda_1 + min omega)
    rhs = abs(problem.lam) + np.max(np.abs(omega)) + np.max(
        problem.m.values * problem.g.max_envelope(upper))
    amplification = max(1.0, rhs / (problem.lambda1 + float(np.min(omega))))
    return conf.monotone_slack * amplification * (1.0 + np.abs(u))


def monotone_solve(problem, pair, max_iter=None, adaptive=True):
    """
    Iterate ``F(u) = (omega + A)^-1 (lambda u + omega u - m g(u) u)`` from both
    ends of an ordered pair.

    The iteration from ``pair.super`` is nonincreasing and the one from
    ``pair.sub`` nondecreasing; both are checked to stay monotone and inside
    the order interval within ``conf.monotone_slack``. Each stops when its step
    falls below ``conf.fixed_point_tol * (1 + ||u||)``. The two limits must
    agree within ``conf.agreement_tol``.

    With ``adaptive`` the shift becomes a per-cell shift re-picked from the
    current upper iterate, which is a supersolution, with ``lower`` at
    ``-lambda_1(A)``. A smaller shift speeds the iteration up close to
    ``lambda_1``.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
    pair : `~roughlog.logistic.SubSuperPair`
    max_iter : `int`, optional
        Defaults to ``conf.fixed_point_max_iter``.
    adaptive : `bool`, optional

    Returns
    -------
    `LogisticSolution`

    Raises
    ------
    `~roughlog.utils.exceptions.MonotonicityError`
        An iterate broke monotonicity or left the order interval; ``omega`` is wrong.
    `~roughlog.utils.exceptions.UniquenessError`
        The limits from above and below stay apart.
    `~roughlog.utils.exceptions.ConvergenceError`
        ``max_iter`` reached.
    """
    max_iter = conf.fixed_point_max_iter if max_iter is None else max_iter
    op, n = problem.op, problem.n
    sub = as_cell_vector(pair.sub, n, "sub")
    sup = as_cell_vector(pair.super, n, "super")
    if not np.all(sub > 0) or not np.all(sub <= sup):
        raise PreconditionError("The pair must satisfy 0 < sub <= super.")
    lambda1 = problem.lambda1
    shift_margin = 1e-2 * (1 + abs(problem.lam))

    omega = np.full(n, float(pair.omega))
    resolvent = Resolvent(op, pair.omega)
    upper, lower = sup.copy(), sub.copy()
    counts = {"above": 0, "below": 0}
    done = {"above": False, "below": False}
    width_check = None

    for iteration in range(1, max_iter + 1):
        slack = _slack(problem, omega, upper, upper)
        if not done["above"]:
            new = _map(problem, resolvent, omega, upper)
            if np.any(new > upper + slack) or np.any(new < sub - slack):
                raise MonotonicityError(f"The iteration from above broke monotonicity at step "
                                        f"{counts['above'] + 1} by "
                                        f"{max(np.max(new - upper), np.max(sub - new)):.3e}.")
            step = sup_norm(new - upper)
            upper = np.minimum(new, upper)
            counts["above"] += 1
            done["above"] = step < conf.fixed_point_tol * (1 + sup_norm(upper))
        if not done["below"]:
            new = _map(problem, resolvent, omega, lower)
            if np.any(new < lower - slack) or np.any(new > sup + slack):
                raise MonotonicityError(f"The iteration from below broke monotonicity at step "
                                        f"{counts['below'] + 1} by "
                                        f"{max(np.max(lower - new), np.max(new - sup)):.3e}.")
            step = sup_norm(new - lower)
            lower = np.maximum(new, lower)
            counts["below"] += 1
            done["below"] = step < conf.fixed_point_tol * (1 + sup_norm(lower))
        if np.any(lower > upper + slack):
            raise MonotonicityError("The iteration from below overtook the one from above by "
                                    f"{np.max(lower - upper):.3e}.")

        if done["above"] and done["below"]:
            width = sup_norm(upper - lower)
            if width <= conf.agreement_tol * (1 + sup_norm(upper)):
                break
            # both steps are small but the limits differ: go on while the gap shrinks
            if width_check is None:
                width_check = (iteration, width)
            elif iteration - width_check[0] >= 100:
                if width > 0.999 * width_check[1]:
                    raise UniquenessError(f"The limits from above and below differ by "
                                          f"{width:.3e}.")
                width_check = (iteration, width)
            done = {"above": False, "below": False}

        if adaptive and iteration % _REPICK_EVERY == 0:
            candidate = _cell_omega(problem, upper, shift_margin, -lambda1 + shift_margin)
            if np.max(omega - candidate) > 0.1 * (1 + np.max(np.abs(omega))):
                omega = candidate
                resolvent = Resolvent(add_potential(op, omega), 0.0)
                log.debug(f"monotone_solve: shift lowered to [{omega.min():.4g}, "
                          f"{omega.max():.4g}] at step {iteration}.")
    else:
        raise ConvergenceError(f"The monotone iteration did not converge in {max_iter} steps.",
                               residual=sup_norm(upper - lower),
                               diagnostics={"iterations_above": counts["above"],
                                            "iterations_below": counts["below"]})

    candidates = [upper, lower]
    residuals = [sup_norm(problem.residual(v)) for v in candidates]
    best = int(np.argmin(residuals))
    u = candidates[best]
    if not np.all(u > 0):
        raise ConvergenceError("The limit is not strictly positive.", residual=residuals[best])
    solution = LogisticSolution(u, problem.lam, counts["above"], counts["below"], residuals[best],
                                stability_margin(problem, u), _pev_gap(problem, u),
                                sup_norm(upper - lower))
    log.info(f"monotone_solve: lambda={problem.lam:.6g}, ||u||={solution.sup_norm:.6g}, "
             f"{counts['above']}/{counts['below']} steps, residual {solution.residual:.2e}.")
    return solution


def solve_logistic(problem, lstar=None, delta=None, workers=None):
    """
    Build an ordered pair and run `monotone_solve`.

    Returns
    -------
    `LogisticSolution`
    """
    sub = build_subsolution(problem)
    sup = build_supersolution(problem, delta=delta, lstar=lstar, workers=workers)
    return monotone_solve(problem, order_pair(problem, sub, sup))


def _pev_gap(problem, u):
    return abs(problem.lam - principal_pair(add_potential(problem.op, problem.potential(u)))
               .lambda1)


def verify_solution(problem, u, t=0.01, pev_tolerance=1e-6):
    """
    Certify a candidate solution.

    Three certificates are reported: the sup-norm residual of the equation,
    the gap ``|lambda - lambda_1(A + m g(u))|`` and the bound
    ``u <= (1 + dt lambda)^k (I + dt A)^-k u`` with ``k = 16`` implicit Euler
    steps to time ``t``, the discrete form of ``u <= exp(lambda t) T(t) u``.

    Returns
    -------
    `SolutionReport`
    """
    u = as_cell_vector(u, problem.n, "u")
    if not np.all(u > 0):
        raise ValueError("verify_solution needs a strictly positive u.")
    residual = problem.residual(u)
    residual_pass = bool(np.all(np.abs(residual)
                                <= conf.residual_rtol * (1 + problem.residual_scale(u))))
    pev_gap = _pev_gap(problem, u)
    n_steps = 16
    dt = t / n_steps
    bound = (1 + dt * problem.lam) ** n_steps * evolve(Stepper(problem.op, dt), u, t)
    violation = float(np.max(u - bound))
    semigroup_pass = violation <= conf.residual_rtol * (1 + sup_norm(u))
    return SolutionReport(sup_norm(residual), residual_pass, pev_gap, pev_gap <= pev_tolerance,
                          violation, bool(semigroup_pass))


def stability_margin(problem, u):
    """
    ``lambda_1(A + m g(u) + m g'(u) u) - lambda``.

    A positive margin certifies that ``u`` is a linearly stable equilibrium.
    """
    u = as_cell_vector(u, problem.n, "u")
    linearized = add_potential(problem.op, problem.linearized_potential(u))
    return principal_pair(linearized).lambda1 - problem.lam


def zero_state_margin(problem):
    """
    The stability margin of ``u = 0``, ``lambda_1(A) - lambda``.

    Negative whenever a positive solution exists.
    """
    return problem.lambda1 - problem.lam


def damped_newton(problem, u0, tolerance=None, max_iter=100):
    """
    Newton's method with backtracking on ``A u - lambda u + m g(u) u = 0``.

    An independent solver for cross-checking `monotone_solve`. It converges to
    whichever root is closest and may find ``u = 0``.

    Returns
    -------
    `NewtonResult`
    """
    u = as_cell_vector(u0, problem.n, "u0").copy()
    identity = sparse.identity(problem.n, format="csr")
    norm = sup_norm(problem.residual(u))
    for iteration in range(1, max_iter + 1):
        tol = (conf.residual_rtol * (1 + np.max(problem.residual_scale(u)))
               if tolerance is None else tolerance)
        if norm <= tol:
            return NewtonResult(u, iteration - 1, norm)
        jacobian = (problem.op.matrix - problem.lam * identity
                    + sparse.diags(problem.linearized_potential(u)))
        du = spla.spsolve(jacobian.tocsc(), -problem.residual(u))
        step = 1.0
        while step > 1e-10:
            trial = u + step * du
            trial_norm = sup_norm(problem.residual(trial))
            if trial_norm < (1 - 1e-4 * step) * norm:
                break
            step /= 2
        else:
            raise ConvergenceError("Newton line search failed.", residual=norm,
                                   diagnostics={"iterations": iteration})
        u, norm = trial, trial_norm
    raise ConvergenceError(f"Newton did not converge in {max_iter} steps.", residual=norm)


def decay_probe(problem, u0=None, n_iter=10000):
    """
    Sup norm after ``n_iter`` steps of the monotone map from ``u0``.

    Below ``lambda_1(A)`` there is no positive fixed point and the iterates decay to 0.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
    u0 : array-like, optional
        Positive start; defaults to the principal eigenvector scaled to sup norm 1.
    n_iter : `int`, optional

    Returns
    -------
    `float`
    """
    if u0 is None:
        u0 = problem.principal.u / problem.principal.sup_norm
    u = as_cell_vector(u0, problem.n, "u0").copy()
    omega = pick_omega(problem, sup_norm(u))
    resolvent = Resolvent(problem.op, omega)
    for _ in range(n_iter):
        u = _map(problem, resolvent, omega, u)
    return sup_norm(u)
