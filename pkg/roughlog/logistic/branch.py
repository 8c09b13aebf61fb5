"""
The solution branch ``lambda -> u_lambda`` and its derivative.
"""
import numpy as np
from astropy.table import Table

from roughlog.assembly.operator import add_potential
from roughlog.logger import log
from roughlog.logistic.construction import (Subsolution, build_subsolution,
                                            build_supersolution, order_pair)
from roughlog.logistic.solver import monotone_solve, solve_logistic, stability_margin
from roughlog.spectral.resolvent import Resolvent
from roughlog.spectral.threshold import LambdaStarResult, lambda_star
from roughlog.utils import io
from roughlog.utils.exceptions import (ConvergenceError, MonotonicityError,
                                       PreconditionError)
from roughlog.utils.misc import as_cell_vector

__all__ = ['Branch', 'continue_branch', 'branch_derivative', 'derivative_by_differences',
           'write_branch', 'reachable_ratio']


class Branch:
    """
    Solutions along an increasing grid of ``lambda``.

    Parameters
    ----------
    lambdas : sequence of `float`
    solutions : `list` of `~roughlog.logistic.LogisticSolution`
    derivatives : `list`
        ``v_lambda`` per point, or `None` where the linearization was too close
        to singular.
    lstar : `float`, optional
        The threshold the branch was computed against.
    """

    def __init__(self, lambdas, solutions, derivatives, lstar=np.nan):
        self.lambdas = np.asarray(lambdas, dtype=float)
        self.solutions = list(solutions)
        self.derivatives = list(derivatives)
        self.lstar = float(lstar)

    @property
    def sup_norms(self):
        return np.array([s.sup_norm for s in self.solutions])

    @property
    def strictly_increasing(self):
        """
        Whether every cell strictly increases between consecutive solutions.
        """
        return all(np.all(b.u > a.u) for a, b in zip(self.solutions, self.solutions[1:]))

    def to_table(self):
        return Table({
            "lambda": self.lambdas,
            "sup_norm": self.sup_norms,
            "stability_margin": np.array([s.stability_margin for s in self.solutions]),
            "pev_gap": np.array([s.pev_gap for s in self.solutions]),
            "iterations": np.array([s.iterations for s in self.solutions], dtype=int),
        })

    def __len__(self):
        return len(self.solutions)

    def __repr__(self):
        return (f"Branch({len(self)} points, lambda in [{self.lambdas.min():.6g}, "
                f"{self.lambdas.max():.6g}])")


def continue_branch(problem, lambdas, lstar=None, derivatives=True, workers=None):
    """
    Solve along an increasing grid of ``lambda``.

    Each iteration from below starts at the larger of ``epsilon psi`` and the
    previous solution, which is a subsolution at every larger ``lambda``.
    Consecutive solutions are required to increase at every cell.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
        Template; its ``lambda`` is ignored.
    lambdas : sequence of `float`
        Strictly increasing, inside the existence interval.
    lstar : `float` or `~roughlog.spectral.LambdaStarResult`, optional
        Computed once when omitted.
    derivatives : `bool`, optional
        Also compute ``v_lambda`` with `branch_derivative`.

    Returns
    -------
    `Branch`

    Raises
    ------
    `~roughlog.utils.exceptions.MonotonicityError`
        A solution decreased somewhere by more than ``1e-10 (1 + ||u||)``.
    """
    lambdas = [float(lam) for lam in lambdas]
    if not lambdas or np.any(np.diff(lambdas) <= 0):
        raise ValueError("The lambda grid must be nonempty and strictly increasing.")
    if lstar is None:
        lstar = lambda_star(problem.op, problem.m, workers=workers)
    threshold = lstar.value if isinstance(lstar, LambdaStarResult) else float(lstar)
    if lambdas[0] <= problem.lambda1 or lambdas[-1] >= threshold:
        raise PreconditionError(f"The lambda grid must lie inside ({problem.lambda1:.6g}, "
                                f"{threshold:.6g}).")
    solutions, slopes = [], []
    previous = None
    for lam in lambdas:
        current = problem.with_lambda(lam)
        sub = build_subsolution(current)
        if previous is not None:
            sub = Subsolution(np.nan, np.maximum(sub.vector, previous.u))
        sup = build_supersolution(current, lstar=threshold)
        solution = monotone_solve(current, order_pair(current, sub, sup))
        if previous is not None:
            drop = float(np.max(previous.u - solution.u))
            if drop > 1e-10 * (1 + solution.sup_norm):
                raise MonotonicityError(f"u decreased by {drop:.3e} between lambda="
                                        f"{previous.lam} and lambda={lam}.")
        slope = None
        if derivatives:
            try:
                slope = branch_derivative(current, solution.u, margin=solution.stability_margin)
            except PreconditionError as e:
                log.warning(f"continue_branch: no derivative at lambda={lam}: {e}")
        solutions.append(solution)
        slopes.append(slope)
        previous = solution
    return Branch(lambdas, solutions, slopes, threshold)


def branch_derivative(problem, u, margin=None, tolerance=1e-8):
    """
    ``v_lambda = du/dlambda`` from ``(A + m g(u) + m g'(u) u - lambda) v = u``.

    Parameters
    ----------
    problem : `~roughlog.logistic.LogisticProblem`
    u : array-like
        The solution at ``problem.lam``.
    margin : `float`, optional
        A precomputed `~roughlog.logistic.stability_margin`.
    tolerance : `float`, optional
        Margins at or below ``tolerance * (1 + |lambda|)`` are refused.

    Returns
    -------
    `numpy.ndarray`
        Strictly positive.

    Raises
    ------
    `~roughlog.utils.exceptions.PreconditionError`
        The linearization is singular or nearly so.
    """
    u = as_cell_vector(u, problem.n, "u")
    margin = stability_margin(problem, u) if margin is None else margin
    if margin <= tolerance * (1 + abs(problem.lam)):
        raise PreconditionError(f"The stability margin {margin:.3e} is too small to invert "
                                "the linearization.")
    linearized = add_potential(problem.op, problem.linearized_potential(u) - problem.lam)
    v = Resolvent(linearized, 0.0).solve(u)
    if not np.all(v > 0):
        raise ConvergenceError(f"The branch derivative is not positive (min {v.min():.3e}).")
    return v


def derivative_by_differences(problem, eta=1e-4, lstar=None):
    """
    ``(u_{lambda + eta} - u_{lambda - eta}) / 2 eta`` from two full solves.
    """
    plus = solve_logistic(problem.with_lambda(problem.lam + eta), lstar=lstar)
    minus = solve_logistic(problem.with_lambda(problem.lam - eta), lstar=lstar)
    return (plus.u - minus.u) / (2 * eta)


def write_branch(branch, path):
    """
    Write ``lambda,sup_norm,stability_margin,pev_gap,iterations`` CSV.
    """
    io.write_table(branch.to_table(), path)


def reachable_ratio(branch, lstar=None):
    """
    The largest ``lambda / lambda*`` solved on the branch; ``nan`` for an
    infinite threshold.
    """
    lstar = branch.lstar if lstar is None else float(lstar)
    if not np.isfinite(lstar) or lstar <= 0 or len(branch) == 0:
        return np.nan
    return float(max(s.lam for s in branch.solutions) / lstar)

