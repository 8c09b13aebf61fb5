"""
Task dispatch: run an `~roughlog.expcli.config.ExperimentConfig` and write its artifacts.

Every run writes ``manifest.json`` and ``checks.jsonl`` into the output
directory, next to the task's own CSV and JSON files.
"""
import platform
import time
from collections import namedtuple
from contextlib import ExitStack
from pathlib import Path

import astropy
import numpy as np
import scipy

from roughlog.assembly.operator import assemble_laplacian
from roughlog.assembly.weights import constant_weight
from roughlog.config import conf
from roughlog.expcli.suite import STRICT, CheckSummary, verify_suite
from roughlog.logger import log
from roughlog.logistic.branch import continue_branch, write_branch
from roughlog.logistic.solver import solve_logistic, verify_solution
from roughlog.semigroup.checks import (check_domination, check_kato,
                                       check_positivity_improving, check_sandwich,
                                       check_semigroup_property, check_submarkov)
from roughlog.spectral.principal import principal_pair, write_eigenvector
from roughlog.spectral.threshold import lambda_star
from roughlog.utils import io
from roughlog.utils.exceptions import ConfigError, RoughlogError
from roughlog.utils.misc import geometric_schedule
from roughlog.utils.results import CheckResult
from roughlog.version import version

__all__ = ['RunArtifact', 'run', 'TASK_RUNNERS']


class RunArtifact(namedtuple("RunArtifact", "directory manifest outputs checks")):
    """
    What a run left behind.

    Parameters
    ----------
    directory : `pathlib.Path`
    manifest : `dict`
        Config echo, package versions, seed and timings.
    outputs : `list` of `pathlib.Path`
        Files written by the task.
    checks : `~roughlog.expcli.suite.CheckSummary`
    """
    __slots__ = ()

    @property
    def exit_status(self):
        return 0 if self.checks.passed else 1


def versions():
    return {"python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "astropy": astropy.__version__, "roughlog": version}


def _eig(config, out):
    mask = config.build_mask()
    op = config.build_operator(mask)
    pair = principal_pair(op)
    io.write_table({"lambda1": [pair.lambda1], "residual": [pair.residual],
                    "iterations": [pair.iterations], "n": [op.n]}, out / "eig.csv")
    write_eigenvector(pair, mask, out / "eigenvector.csv")
    return [out / "eig.csv", out / "eigenvector.csv"], []


def _schedule(task):
    spec = task.get("schedule")
    if spec is None:
        return None
    if isinstance(spec, list):
        return [float(g) for g in spec]
    try:
        return geometric_schedule(float(spec.get("start", 1.0)), float(spec.get("ratio", 2.0)),
                                  int(spec["count"]))
    except (KeyError, TypeError, ValueError, AttributeError):
        raise ConfigError("task.schedule", "must be a list or an object with a count")


def _lstar(config, out):
    mask = config.build_mask()
    op = config.build_operator(mask)
    m = config.build_weight(mask)
    result = lambda_star(op, m, schedule=_schedule(config.task))
    result.write(out / "lstar.csv")
    io.write_json({"lambda_star": result.value, "lambda1": principal_pair(op).lambda1,
                   "extrapolated": result.extrapolated, "converged": result.converged},
                  out / "lstar.json")
    return [out / "lstar.csv", out / "lstar.json"], []


def _solve(config, out):
    problem = config.build_problem(float(config.task["lambda"]))
    solution = solve_logistic(problem)
    solution.write(problem.op.mask, out / "solution.csv")
    report = verify_solution(problem, solution.u)
    io.write_json({"lambda": solution.lam, "sup_norm": solution.sup_norm,
                   "residual": solution.residual, "stability_margin": solution.stability_margin,
                   "pev_gap": solution.pev_gap, "agreement": solution.agreement,
                   "iterations_above": solution.iterations_above,
                   "iterations_below": solution.iterations_below}, out / "solve.json")
    checks = [
        CheckResult("residual", {"lambda": solution.lam}, report.residual,
                    conf.residual_rtol * (1 + solution.sup_norm), report.residual_pass),
        CheckResult.from_violation("pev_gap", report.pev_gap, 1e-6, **{"lambda": solution.lam}),
        CheckResult("semigroup_bound", {"t": 0.01}, report.semigroup_violation,
                    conf.residual_rtol * (1 + solution.sup_norm), report.semigroup_pass),
        CheckResult.from_violation("agreement", solution.agreement,
                                   conf.agreement_tol * (1 + solution.sup_norm)),
        CheckResult.from_violation("stability_margin", -solution.stability_margin, 0.0),
    ]
    return [out / "solution.csv", out / "solve.json"], checks


def _lambdas(task):
    if "lambdas" in task:
        lambdas = task["lambdas"]
        if not isinstance(lambdas, list) or not lambdas:
            raise ConfigError("task.lambdas", "must be a nonempty list")
        return [float(lam) for lam in lambdas]
    try:
        return np.linspace(float(task["start"]), float(task["stop"]), int(task["count"])).tolist()
    except KeyError as e:
        raise ConfigError(f"task.{e.args[0]}", "required when task.lambdas is absent")


def _branch(config, out):
    lambdas = _lambdas(config.task)
    problem = config.build_problem(lambdas[0])
    branch = continue_branch(problem, lambdas, derivatives=bool(config.task.get("derivatives",
                                                                                 True)))
    write_branch(branch, out / "branch.csv")
    increasing = CheckResult("branch_increasing", {"points": len(branch)},
                             0.0 if branch.strictly_increasing else 1.0, 0.0,
                             branch.strictly_increasing)
    return [out / "branch.csv"], [increasing]


def _guarded(name, func, *args, **params):
    try:
        return func(*args)
    except RoughlogError as e:
        log.warning(f"{name} failed with {type(e).__name__}: {e}")
        return CheckResult(name, dict(params, error=type(e).__name__, message=str(e)),
                           np.inf, 0.0, False)


def _semigroup_check(config, out):
    mask = config.build_mask()
    op = config.build_operator(mask)
    rng = config.rng()
    t = float(config.task.get("t", 0.01))
    tol = float(config.task.get("tolerance", 1e-8))
    vectors = rng.uniform(-1, 1, (int(config.task.get("vectors", 50)), op.n))

    def kato():
        return CheckResult.from_violation("kato", max(check_kato(op, u) for u in vectors), 1e-12,
                                          vectors=len(vectors))

    checks = [
        _guarded("kato", kato),
        _guarded("submarkov", lambda: CheckResult.from_violation(
            "submarkov", check_submarkov(op, t), tol, t=t), t=t),
        _guarded("positivity_improving", lambda: CheckResult.from_violation(
            "positivity_improving", -check_positivity_improving(op, t), STRICT, t=t), t=t),
        _guarded("semigroup_property", lambda: CheckResult.from_violation(
            "semigroup_property", check_semigroup_property(op, t, t), tol, t=t), t=t),
    ]
    if config.operator.get("type", "laplacian") == "laplacian":
        neumann = assemble_laplacian(mask, "neumann")
        checks.append(_guarded("domination_by_neumann", lambda: CheckResult.from_violation(
            "domination_by_neumann", check_domination(op, neumann, t), tol, t=t), t=t))
    m = config.build_weight(mask) if config.weight is not None else constant_weight(mask)
    checks.append(_guarded("sandwich", lambda: CheckResult.from_violation(
        "sandwich", check_sandwich(op, m, t), tol, t=t), t=t))
    return [], checks


TASK_RUNNERS = {"eig": _eig, "lstar": _lstar, "solve": _solve, "branch": _branch,
                "semigroup-check": _semigroup_check}


def run(config, workers=None):
    """
    Run the configured task.

    The ``tolerances`` block is applied with ``conf.set_temp`` for the duration
    of the run. A numerical failure is recorded as a failed check named after
    the task; configuration errors propagate.

    Parameters
    ----------
    config : `~roughlog.expcli.config.ExperimentConfig`
    workers : `int`, optional
        Only used by the ``verify`` task.

    Returns
    -------
    `RunArtifact`
    """
    name = config.task["name"]
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    outputs, checks, timings = [], [], {}
    with ExitStack() as stack:
        for key, value in config.tolerances.items():
            stack.enter_context(conf.set_temp(key, value))
        try:
            if name == "verify":
                summary = verify_suite(config.task.get("level", "quick"), config.seed, workers)
                checks = list(summary.values())
                timings.update(summary.timings)
            else:
                outputs, checks = TASK_RUNNERS[name](config, out)
        except ConfigError:
            raise
        except RoughlogError as e:
            log.error(f"Task {name} failed with {type(e).__name__}: {e}")
            checks = [CheckResult(name, {"error": type(e).__name__, "message": str(e)},
                                  np.inf, 0.0, False)]
    timings["total"] = time.perf_counter() - start
    summary = CheckSummary(checks, config.task.get("level", name), timings)
    summary.write(out / "checks.jsonl")
    manifest = {"config": config.to_dict(), "versions": versions(), "seed": config.seed,
                "task": name, "outputs": [p.name for p in outputs], "timings": timings,
                "passed": summary.passed}
    io.write_json(manifest, out / "manifest.json")
    status = "pass" if summary.passed else "FAIL"
    log.info(f"{name}: wrote {len(outputs) + 2} files to {out} ({status}).")
    return RunArtifact(out, manifest, outputs, summary)

