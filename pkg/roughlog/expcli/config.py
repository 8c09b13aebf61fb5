"""
Declarative experiment configuration.

An experiment is a JSON document with the top-level keys ``domain``,
``operator``, ``weight``, ``nonlinearity``, ``task``, ``seed``, ``tolerances``
and ``output``::

    {
      "domain": {"shape": {"kind": "interval"}, "h": 0.015625, "extent": [[0, 1]]},
      "operator": {"type": "laplacian", "bc": {"kind": "dirichlet"}},
      "weight": {"kind": "constant", "value": 1.0},
      "nonlinearity": {"family": "linear"},
      "task": {"name": "eig"},
      "seed": 0
    }

Validation errors name the offending field, e.g. ``operator.bc.beta: required for Robin``.
"""
import json
from pathlib import Path

import numpy as np
from astropy.config import ConfigItem

from roughlog.assembly.coefficients import BoundaryCondition, EllipticCoefficients
from roughlog.assembly.operator import assemble_divergence_form, assemble_laplacian
from roughlog.assembly.weights import (Weight, bump_weight, constant_weight, indicator_weight,
                                       product_weight)
from roughlog.config import Conf
from roughlog.domain.grid import CellSet, GridSpec, cells_in_box
from roughlog.domain.shapes import ShapeSpec, make_domain
from roughlog.logistic.nonlinearity import Nonlinearity
from roughlog.logistic.problem import LogisticProblem
from roughlog.utils.exceptions import ConfigError, RoughlogError

__all__ = ['TASKS', 'ExperimentConfig', 'load_config']

TASKS = ("eig", "lstar", "solve", "branch", "semigroup-check", "verify")
_KEYS = {"domain", "operator", "weight", "nonlinearity", "task", "seed", "tolerances", "output"}
_OPERATOR_TYPES = ("laplacian", "divergence")
_WEIGHT_KINDS = ("constant", "indicator", "bump", "product")


def _require(section, key, path):
    if not isinstance(section, dict):
        raise ConfigError(path, "must be an object")
    if key not in section:
        raise ConfigError(f"{path}.{key}", "required")
    return section[key]


def _number(value, path, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"must be a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    return float(value)


class ExperimentConfig:
    """
    A validated experiment configuration.

    Parameters
    ----------
    config : `dict`
        The parsed JSON document.

    Raises
    ------
    `~roughlog.utils.exceptions.ConfigError`
        A field is missing, has the wrong type or names something unknown.
    """

    def __init__(self, config):
        if not isinstance(config, dict):
            raise ConfigError("config", "must be an object")
        unknown = set(config) - _KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown top-level key")
        self.raw = config
        self.task = self._validate_task(config.get("task", {"name": "verify"}))
        self.seed = self._validate_seed(config.get("seed"))
        self.tolerances = self._validate_tolerances(config.get("tolerances", {}))
        self.output = str(config.get("output", "roughlog-out"))
        self.domain = config.get("domain")
        self.operator = config.get("operator")
        self.weight = config.get("weight")
        self.nonlinearity = config.get("nonlinearity", {"family": "linear"})
        if self.task["name"] != "verify":
            self._validate_problem()

    def _validate_task(self, task):
        if isinstance(task, str):
            task = {"name": task}
        name = _require(task, "name", "task")
        if name not in TASKS:
            raise ConfigError("task.name", f"unknown task {name!r}; expected one of {TASKS}")
        if name == "verify" and task.get("level", "quick") not in ("quick", "full"):
            raise ConfigError("task.level", "must be 'quick' or 'full'")
        return dict(task)

    @staticmethod
    def _validate_seed(seed):
        if seed is None:
            raise ConfigError("seed", "required")
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed", f"must be a nonnegative integer, got {seed!r}")
        return seed

    @staticmethod
    def _validate_tolerances(tolerances):
        if not isinstance(tolerances, dict):
            raise ConfigError("tolerances", "must be an object")
        for key, value in tolerances.items():
            if not isinstance(Conf.__dict__.get(key), ConfigItem):
                raise ConfigError(f"tolerances.{key}", "not a roughlog configuration item")
            if isinstance(value, bool) or not isinstance(value, (int, float, str)):
                raise ConfigError(f"tolerances.{key}", f"unsupported value {value!r}")
        return dict(tolerances)

    def _validate_problem(self):
        domain = self.domain
        _require(domain, "shape", "domain")
        _number(_require(domain, "h", "domain"), "domain.h", positive=True)
        operator = self.operator
        if operator is None:
            raise ConfigError("operator", "required")
        kind = operator.get("type", "laplacian") if isinstance(operator, dict) else None
        if kind not in _OPERATOR_TYPES:
            raise ConfigError("operator.type", f"must be one of {_OPERATOR_TYPES}")
        bc = _require(operator, "bc", "operator")
        if isinstance(bc, str):
            bc = {"kind": bc}
        bc_kind = _require(bc, "kind", "operator.bc")
        if bc_kind not in BoundaryCondition.KINDS:
            raise ConfigError("operator.bc.kind", f"must be one of {BoundaryCondition.KINDS}")
        if bc_kind == "robin":
            if "beta" not in bc:
                raise ConfigError("operator.bc.beta", "required for Robin")
            _number(bc["beta"], "operator.bc.beta", positive=True)
        elif "beta" in bc:
            raise ConfigError("operator.bc.beta", f"not allowed for {bc_kind}")
        if self.task["name"] in ("lstar", "solve", "branch"):
            if self.weight is None:
                raise ConfigError("weight", f"required for task {self.task['name']!r}")
            self._validate_weight(self.weight, "weight")
        if self.task["name"] in ("solve", "branch"):
            _require(self.nonlinearity, "family", "nonlinearity")
            try:
                Nonlinearity.from_config(self.nonlinearity)
            except ValueError as e:
                raise ConfigError("nonlinearity", str(e))
        if self.task["name"] == "solve":
            _number(_require(self.task, "lambda", "task"), "task.lambda")

    def _validate_weight(self, weight, path):
        kind = _require(weight, "kind", path)
        if kind not in _WEIGHT_KINDS:
            raise ConfigError(f"{path}.kind", f"must be one of {_WEIGHT_KINDS}")
        if kind == "bump":
            _require(weight, "center", path)
            _number(_require(weight, "radius", path), f"{path}.radius", positive=True)
        elif kind == "indicator":
            box = _require(weight, "box", path)
            _require(box, "lower", f"{path}.box")
            _require(box, "upper", f"{path}.box")
        elif kind == "product":
            factors = _require(weight, "factors", path)
            if not isinstance(factors, list) or not factors:
                raise ConfigError(f"{path}.factors", "must be a nonempty list")
            for i, factor in enumerate(factors):
                self._validate_weight(factor, f"{path}.factors[{i}]")

    def _wrap(self, path, func, *args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValueError, TypeError) as e:
            if isinstance(e, RoughlogError) and not isinstance(e, ConfigError):
                raise
            raise ConfigError(path, str(e))

    def build_mask(self):
        """
        Rasterize the configured domain.

        ``domain.extent`` (default the unit interval or square, by shape
        dimension) fixes a nodal grid of width ``domain.h``.
        """
        domain = self.domain
        shape = self._wrap("domain.shape", ShapeSpec.from_config, domain["shape"])
        extent = domain.get("extent")
        if extent is None:
            extent = ((0.0, 1.0),) if shape.ndim == 1 else ((0.0, 1.0), (0.0, 1.0))
        grid = self._wrap("domain.extent", GridSpec.nodal, float(domain["h"]), extent)
        return self._wrap("domain", make_domain, shape, grid, name=domain.get("name"))

    def build_operator(self, mask):
        operator = self.operator
        bc = operator["bc"]
        if isinstance(bc, str):
            bc = {"kind": bc}
        bc = self._wrap("operator.bc", BoundaryCondition, bc["kind"], bc.get("beta"),
                        bc.get("beta_min"))
        if operator.get("type", "laplacian") == "laplacian":
            return assemble_laplacian(mask, bc)
        coefficients = operator.get("coefficients", {})
        coeffs = self._wrap("operator.coefficients", EllipticCoefficients, mask, **coefficients)
        return self._wrap("operator.coefficients", assemble_divergence_form, mask, coeffs, bc)

    def build_weight(self, mask, weight=None, path="weight"):
        """
        Build the configured weight.

        ``constant`` takes ``value``; ``indicator`` takes ``box`` with ``lower``
        and ``upper`` corners, ``value`` and ``complement`` (weight on the
        cells outside the open box); ``bump`` takes ``center``, ``radius`` and
        ``height``; ``product`` multiplies its ``factors``.
        """
        weight = self.weight if weight is None else weight
        kind = weight["kind"]
        if kind == "constant":
            return constant_weight(mask, _number(weight.get("value", 1.0), f"{path}.value"))
        if kind == "indicator":
            box = weight["box"]
            cells = self._wrap(f"{path}.box", cells_in_box, mask, box["lower"], box["upper"])
            if weight.get("complement", False):
                cells = CellSet(mask, ~cells.members)
            return self._wrap(path, indicator_weight, mask, cells, weight.get("value", 1.0))
        if kind == "bump":
            return self._wrap(path, bump_weight, mask, weight["center"], weight["radius"],
                              weight.get("height", 1.0))
        factors = [self.build_weight(mask, f, f"{path}.factors[{i}]")
                   for i, f in enumerate(weight["factors"])]
        return product_weight(*factors)

    def build_problem(self, lam, mask=None, op=None):
        mask = self.build_mask() if mask is None else mask
        op = self.build_operator(mask) if op is None else op
        m = self.build_weight(mask)
        if not isinstance(m, Weight) or m.is_zero:
            raise ConfigError("weight", "vanishes on every cell")
        g = self._wrap("nonlinearity", Nonlinearity.from_config, self.nonlinearity)
        return LogisticProblem(op, m, g, lam)

    def rng(self):
        return np.random.default_rng(self.seed)

    def to_dict(self):
        record = dict(self.raw)
        record["seed"] = self.seed
        record["task"] = self.task
        return record


def load_config(path=None, overrides=None):
    """
    Load a configuration file, apply flat ``overrides`` (``seed``, ``output``,
    ``task``, ``level``) and validate.

    Returns
    -------
    `ExperimentConfig`
    """
    if path is None:
        raw = {"task": {"name": "verify"}, "seed": 0}
    else:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as e:
            raise ConfigError("config", f"can not read {path}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"invalid JSON at line {e.lineno}: {e.msg}")
    if not isinstance(raw, dict):
        raise ConfigError("config", "must be an object")
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if "task" in overrides:
        task = raw.get("task", {})
        task = dict(task) if isinstance(task, dict) else {}
        task["name"] = overrides.pop("task")
        raw["task"] = task
    if "level" in overrides:
        raw.setdefault("task", {"name": "verify"})
        raw["task"]["level"] = overrides.pop("level")
    raw.update(overrides)
    return ExperimentConfig(raw)
