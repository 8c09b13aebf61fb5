"""
The verification suite: fifteen numbered criteria, each returning a
`~roughlog.utils.results.CheckResult`.

A criterion made of several measurements reports the largest excess
``value - tolerance`` over its parts with tolerance ``0``; the parts are
listed under ``params``.
"""
import textwrap
import time
import warnings
from collections import OrderedDict
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from roughlog.assembly.coefficients import BoundaryCondition, EllipticCoefficients
from roughlog.assembly.operator import (add_potential, assemble_divergence_form,
                                        assemble_laplacian)
from roughlog.assembly.weights import Weight, bump_weight, constant_weight, indicator_weight
from roughlog.domain.grid import GridSpec, cells_in_box, is_connected, submask
from roughlog.domain.shapes import Boxes, Disk, Interval, LShape, Slit, Square, make_domain
from roughlog.logger import log
from roughlog.logistic.branch import branch_derivative, continue_branch
from roughlog.logistic.nonlinearity import Linear
from roughlog.logistic.problem import LogisticProblem
from roughlog.logistic.solver import solve_logistic
from roughlog.semigroup.checks import (check_domination, check_kato, check_sandwich,
                                       check_trotter, fit_ultracontractivity)
from roughlog.semigroup.evolution import Stepper, dense_propagator, gaussian_kernel
from roughlog.spectral.principal import principal_pair
from roughlog.spectral.threshold import (eigenvector_comparison, lambda_star,
                                         weight_continuity_probe)
from roughlog.utils.exceptions import RoughlogError, RoughlogUserWarning
from roughlog.utils.io import write_json
from roughlog.utils.misc import geometric_schedule
from roughlog.utils.parallel import parallel_map
from roughlog.utils.results import CheckResult

__all__ = ['CRITERIA', 'QUICK', 'CheckSummary', 'verify_suite', 'run_criterion']

CRITERIA = OrderedDict()
QUICK = (1, 3, 7, 10, 13)
# a strict inequality value > 0 is reported as -value <= STRICT
STRICT = -np.finfo(float).tiny


def criterion(number, name):
    def register(func):
        CRITERIA[number] = (name, func)
        return func
    return register


def _combine(name, parts):
    """
    Merge ``(label, value, tolerance)`` parts into one result.
    """
    params = {label: {"value": float(value), "tolerance": float(tol), "pass": bool(value <= tol)}
              for label, value, tol in parts}
    excess = max(float(value) - float(tol) for _, value, tol in parts)
    passed = all(np.isfinite(value) and value <= tol for _, value, tol in parts)
    return CheckResult(name, params, excess, 0.0, bool(passed))


def interval_dirichlet(h):
    mask = make_domain(Interval(), GridSpec.nodal(h, ((0.0, 1.0),)))
    return assemble_laplacian(mask, "dirichlet")


def square_operator(h, bc="dirichlet", lower=(0.0, 0.0), upper=(1.0, 1.0)):
    extent = tuple(zip(lower, upper))
    mask = make_domain(Square(lower, upper), GridSpec.nodal(h, extent))
    if bc == "robin":
        bc = BoundaryCondition.robin(2.0)
    return assemble_laplacian(mask, bc)


def degenerate_weight(mask):
    """
    One off the open sub-square ``(1/4, 3/4)^2`` and zero on it.
    """
    inside = cells_in_box(mask, (0.25, 0.25), (0.75, 0.75))
    return indicator_weight(mask, ~inside)


def _random_masks(rng, count):
    shapes = [Square(), LShape(), Disk(), Slit()]
    masks = []
    while len(masks) < count:
        shape = shapes[rng.integers(len(shapes))]
        h = 1.0 / rng.choice([16, 20, 24])
        mask = make_domain(shape, GridSpec.nodal(h))
        if is_connected(mask):
            masks.append(mask)
    return masks


@criterion(1, "dirichlet_interval_eigenvalue")
def _interval_eigenvalue(rng, workers):
    hs = [1 / 32, 1 / 64, 1 / 128]
    values = parallel_map(lambda h: principal_pair(interval_dirichlet(h)).lambda1, hs, workers)
    h = hs[1]
    exact = 2 / h ** 2 * (1 - np.cos(np.pi * h))
    relative = abs(values[1] - exact) / exact
    errors = [abs(v - np.pi ** 2) for v in values]
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
    return _combine("dirichlet_interval_eigenvalue",
                    [("closed_form_relative", relative, 1e-8)]
                    + [(f"order_{i}", abs(order - 2.0), 0.2) for i, order in enumerate(orders)])


@criterion(2, "dirichlet_square_richardson")
def _square_richardson(rng, workers):
    hs = [1 / 64, 1 / 128]
    values = parallel_map(lambda h: principal_pair(square_operator(h)).lambda1, hs, workers)
    ratio = abs(values[0] - 2 * np.pi ** 2) / abs(values[1] - 2 * np.pi ** 2)
    return _combine("dirichlet_square_richardson", [("ratio_deviation", abs(ratio - 4.0), 0.4)])


@criterion(3, "strict_eigenvalue_monotonicity")
def _strict_monotonicity(rng, workers):
    masks = _random_masks(rng, 100)
    pairs = []
    for mask in masks:
        op = assemble_laplacian(mask, "dirichlet")
        m1 = rng.uniform(0, 5, mask.n)
        bump = np.where(rng.random(mask.n) < 0.1, rng.uniform(0.5, 1.0, mask.n), 0.0)
        bump[rng.integers(mask.n)] = 1.0
        pairs.append((op, Weight(mask, m1), Weight(mask, m1 + bump)))

    def margin(item):
        op, low, high = item
        return (principal_pair(add_potential(op, high)).lambda1
                - principal_pair(add_potential(op, low)).lambda1)

    margins = parallel_map(margin, pairs, workers)
    return _combine("strict_eigenvalue_monotonicity",
                    [("negative_min_margin", -min(margins), -1e-10)])


@criterion(4, "eigenvalue_continuity")
def _continuity(rng, workers):
    op = square_operator(1 / 32)
    m = constant_weight(op.mask, 10.0)
    deltas = [0.25, 0.125, 0.0625, 0.03125, 1 / 128, 0.0]
    table = weight_continuity_probe(op, m, deltas, workers)
    reference = principal_pair(add_potential(op, m)).lambda1
    values = np.asarray(table["lambda1"])
    decrease = float(np.max(np.maximum(values[:-1] - values[1:], 0.0)))
    return _combine("eigenvalue_continuity",
                    [("lambda1_decrease", decrease, 1e-10),
                     ("final_lambda_gap", abs(values[-1] - reference), 1e-6),
                     ("final_vector_distance", float(table["vector_distance"][-1]), 1e-4)])


@criterion(5, "degenerate_threshold")
def _degenerate_threshold(rng, workers):
    op = square_operator(1 / 128)
    m = degenerate_weight(op.mask)
    result = lambda_star(op, m, schedule=geometric_schedule(1.0, 2.0, 21), workers=workers)
    inside = cells_in_box(op.mask, (0.25, 0.25), (0.75, 0.75))
    oracle = principal_pair(assemble_laplacian(submask(op.mask, inside), "dirichlet")).lambda1
    return _combine("degenerate_threshold",
                    [("relative_difference", abs(result.value - oracle) / oracle, 0.02)])


@criterion(6, "eigenvector_comparison")
def _comparison(rng, workers):
    op = square_operator(1 / 32)
    u0 = principal_pair(op).u
    bumps = [bump_weight(op.mask, rng.uniform(0.35, 0.65, 2), rng.uniform(0.1, 0.2),
                         rng.uniform(1, 50)) for _ in range(20)]

    def excess(m):
        c = eigenvector_comparison(op, m)
        um = principal_pair(add_potential(op, m)).u
        return float(np.max(u0 - c * um)) if np.isfinite(c) else np.inf

    return _combine("eigenvector_comparison",
                    [("max_excess", max(parallel_map(excess, bumps, workers)), 1e-12)])


@criterion(7, "kato_inequality")
def _kato(rng, workers):
    masks = _random_masks(rng, 20)
    worst = -np.inf
    for mask in masks:
        kind = ("dirichlet", "neumann", "robin")[rng.integers(3)]
        bc = BoundaryCondition.robin(rng.uniform(0.5, 5)) if kind == "robin" else kind
        coeffs = EllipticCoefficients(mask, a=rng.uniform(0.5, 2.0, mask.n),
                                      c=rng.uniform(0, 1, mask.n))
        op = assemble_divergence_form(mask, coeffs, bc)
        for _ in range(50):
            worst = max(worst, check_kato(op, rng.uniform(-1, 1, mask.n)))
    return _combine("kato_inequality", [("max_violation", worst, 1e-12)])


@criterion(8, "semigroup_sandwich")
def _sandwich(rng, workers):
    ops = [square_operator(1 / 16), assemble_laplacian(make_domain(LShape(), GridSpec.nodal(1 / 16)),
                                                      "dirichlet")]
    items = [(op, Weight(op.mask, rng.uniform(0, 5, op.n)), t)
             for op in ops for t in (0.005, 0.02)]
    violations = parallel_map(lambda item: check_sandwich(*item), items, workers)
    return _combine("semigroup_sandwich", [("max_violation", max(violations), 1e-8)])


@criterion(9, "trotter_first_order")
def _trotter(rng, workers):
    neumann = assemble_laplacian(make_domain(Interval(), GridSpec.nodal(1 / 32, ((0.0, 1.0),))),
                                 "neumann")
    lshape = assemble_laplacian(make_domain(LShape(), GridSpec.nodal(1 / 16)), "dirichlet")
    instances = [(square_operator(1 / 12), 0.05), (neumann, 0.1), (lshape, 0.02)]
    parts = []
    for i, (op, t) in enumerate(instances):
        m = Weight(op.mask, rng.uniform(0, 10, op.n))
        ratio = check_trotter(op, m, t, 16) / check_trotter(op, m, t, 32)
        parts.append((f"ratio_deviation_{i}", abs(ratio - 2.0), 0.3))
    return _combine("trotter_first_order", parts)


@criterion(10, "logistic_exact_case")
def _logistic_exact(rng, workers):
    op = square_operator(1 / 16, "neumann")
    problem = LogisticProblem(op, constant_weight(op.mask), Linear(), 0.7)
    solution = solve_logistic(problem, lstar=np.inf)
    slope = branch_derivative(problem, solution.u)
    return _combine("logistic_exact_case",
                    [("solution_error", float(np.max(np.abs(solution.u - 0.7))), 1e-8),
                     ("derivative_error", float(np.max(np.abs(slope - 1.0))), 1e-6),
                     ("margin_error", abs(solution.stability_margin - 0.7), 1e-6)])


def _degenerate_problem(h=1 / 32):
    op = square_operator(h)
    return LogisticProblem(op, degenerate_weight(op.mask), Linear(), 0.0)


@criterion(11, "logistic_uniqueness")
def _logistic_uniqueness(rng, workers):
    interval = interval_dirichlet(1 / 64)
    problem_1d = LogisticProblem(interval, constant_weight(interval.mask), Linear(),
                                 principal_pair(interval).lambda1 + 0.5)
    degenerate = _degenerate_problem()
    lstar = lambda_star(degenerate.op, degenerate.m, workers=workers)
    problem_2d = degenerate.with_lambda(0.5 * (degenerate.lambda1 + lstar.value))
    parts = []
    for label, problem, threshold in (("1d", problem_1d, None), ("2d", problem_2d, lstar)):
        solution = solve_logistic(problem, lstar=threshold, workers=workers)
        parts += [(f"{label}_agreement", solution.agreement, 1e-8),
                  (f"{label}_pev_gap", solution.pev_gap, 1e-6),
                  (f"{label}_negative_margin", -solution.stability_margin, 0.0)]
    return _combine("logistic_uniqueness", parts)


@criterion(12, "logistic_branch")
def _logistic_branch(rng, workers):
    problem = _degenerate_problem()
    lstar = lambda_star(problem.op, problem.m, workers=workers)
    lambda1, final = problem.lambda1, 0.95 * lstar.value
    lambdas = lambda1 + np.geomspace(1e-3, final - lambda1, 12)
    branch = continue_branch(problem, lambdas, lstar=lstar, derivatives=False)
    norms = branch.sup_norms
    # the final approach spans the upper two decades of lambda - lambda_1
    start = int(np.searchsorted(lambdas - lambda1, (final - lambda1) / 100))
    growth = norms[-1] / norms[start]
    increase = min(float(np.min(b.u - a.u))
                   for a, b in zip(branch.solutions, branch.solutions[1:]))
    return _combine("logistic_branch",
                    [("negative_min_increase", -increase, STRICT),
                     ("first_sup_norm", norms[0], 1e-2),
                     ("inverse_growth", 1 / growth, 0.1)])


@criterion(13, "domination_and_submarkov")
def _domination(rng, workers):
    t = 0.05
    dirichlet, robin, neumann = (square_operator(1 / 16, bc)
                                 for bc in ("dirichlet", "robin", "neumann"))
    ones = np.ones(neumann.n)
    neumann_image = dense_propagator(neumann, t).matrix @ ones
    robin_image = dense_propagator(robin, t).matrix @ ones
    # at h = 1/64 the unit square has 3969 cells; the 0.45 box keeps 784 under conf.dense_cap
    corner = square_operator(1 / 64, lower=(0.0, 0.0), upper=(0.45, 0.45))
    gaussian = check_domination(corner, gaussian_kernel(corner.mask, 0.02), 0.02)
    return _combine("domination_and_submarkov",
                    [("dirichlet_below_robin", check_domination(dirichlet, robin, t), 1e-8),
                     ("robin_below_neumann", check_domination(robin, neumann, t), 1e-8),
                     ("dirichlet_below_neumann", check_domination(dirichlet, neumann, t), 1e-8),
                     ("neumann_mass_defect", float(np.max(np.abs(neumann_image - 1))), 1e-10),
                     ("robin_excess", float(np.max(robin_image - 1)), 1e-10),
                     ("robin_min_mass_minus_one", float(np.min(robin_image) - 1),
                      STRICT),
                     ("dirichlet_below_gaussian", gaussian, 5e-3)])


@criterion(14, "positivity_improving")
def _positivity_improving(rng, workers):
    connected = square_operator(1 / 16)
    point = np.zeros(connected.n)
    point[0] = 1.0
    minimum = float(Stepper(connected, 0.01).step(point).min())
    boxes = Boxes([[[0.0, 0.0], [0.4, 1.0]], [[0.6, 0.0], [1.0, 1.0]]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RoughlogUserWarning)
        split = assemble_laplacian(make_domain(boxes, GridSpec.nodal(1 / 20)), "dirichlet")
    point = np.zeros(split.n)
    point[0] = 1.0
    image = Stepper(split, 0.01).step(point)
    component = split.mask.component_id
    off = float(np.max(np.abs(image[component != component[0]])))
    on = float(np.min(image[component == component[0]]))
    return _combine("positivity_improving",
                    [("connected_negative_min", -minimum, STRICT),
                     ("disconnected_off_component", off, 0.0),
                     ("disconnected_negative_min_on_component", -on, STRICT)])


@criterion(15, "ultracontractivity_exponent")
def _ultracontractivity(rng, workers):
    exponent_1d = fit_ultracontractivity(interval_dirichlet(1 / 512), workers=workers)
    exponent_2d = fit_ultracontractivity(square_operator(1 / 30), workers=workers)
    return _combine("ultracontractivity_exponent",
                    [("deviation_1d", abs(exponent_1d - 0.25), 0.1),
                     ("deviation_2d", abs(exponent_2d - 0.5), 0.1)])


def run_criterion(number, seed=0, workers=None):
    """
    Run one criterion with its own random stream.

    Hypothesis violations and numerical breakdowns are recorded as a failed
    result naming the exception, never raised.

    Returns
    -------
    `~roughlog.utils.results.CheckResult`, `float`
        The result and the wall time in seconds.
    """
    name, func = CRITERIA[number]
    rng = np.random.default_rng([seed, number])
    start = time.perf_counter()
    try:
        result = func(rng, workers)
    except RoughlogError as e:
        log.warning(f"Criterion {number} ({name}) failed with {type(e).__name__}: {e}")
        result = CheckResult(name, {"error": type(e).__name__, "message": str(e)},
                             np.inf, 0.0, False)
    elapsed = time.perf_counter() - start
    params = dict(result.params, criterion=number)
    return result._replace(params=params), elapsed


class CheckSummary(Mapping):
    """
    The results of a suite run, keyed by criterion name in criterion order.

    Parameters
    ----------
    results : iterable of `~roughlog.utils.results.CheckResult`
    level : `str`
    timings : `dict`, optional
        Wall time per criterion name.
    """

    def __init__(self, results, level, timings=None):
        super().__init__()
        self._results = OrderedDict((r.check, r) for r in results)
        self.level = level
        self.timings = dict(timings or {})

    def __getitem__(self, name):
        return self._results[name]

    def __iter__(self):
        return iter(self._results)

    def __len__(self):
        return len(self._results)

    @property
    def passed(self):
        return all(result.passed for result in self._results.values())

    @property
    def failed(self):
        return [name for name, result in self._results.items() if not result.passed]

    def to_records(self):
        return [result.to_dict() for result in self._results.values()]

    def write(self, path):
        """
        Write the summary as JSON lines, one criterion per line.

        Timings are left out so that repeated runs give identical files.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("")
        for result in self._results.values():
            result.write(path)

    def write_timings(self, path):
        write_json({"level": self.level, "timings": self.timings}, path)

    def __str__(self):
        lines = "\n".join(str(result) for result in self._results.values())
        status = "passed" if self.passed else f"failed: {', '.join(self.failed)}"
        return textwrap.dedent(f"""\
            CheckSummary ({self.level}, {len(self)} criteria, {status})
            """) + lines

    def __repr__(self):
        return f"{object.__repr__(self)}\n{str(self)}"


def verify_suite(level="quick", seed=0, workers=None, numbers=None):
    """
    Run the quick (criteria 1, 3, 7, 10 and 13) or full (1 to 15) suite.

    Criteria run one after another; each parallelizes internally.

    Parameters
    ----------
    level : `str`, optional
        ``"quick"`` or ``"full"``.
    seed : `int`, optional
    workers : `int`, optional
    numbers : sequence of `int`, optional
        Run these criteria instead of the level's set.

    Returns
    -------
    `CheckSummary`
    """
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}.")
    if numbers is None:
        numbers = QUICK if level == "quick" else tuple(CRITERIA)
    results, timings = [], {}
    for number in numbers:
        result, elapsed = run_criterion(number, seed, workers)
        log.info(f"criterion {number}: {result}")
        results.append(result)
        timings[result.check] = elapsed
    return CheckSummary(results, level, timings)

