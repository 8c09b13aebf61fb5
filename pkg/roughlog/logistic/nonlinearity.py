"""
Nonlinearities ``g(xi)`` of the logistic equation.

Every family is extended oddly to ``xi < 0`` so that evaluators are total;
iterates of the solvers never leave the nonnegative cone.
"""
import abc
import numbers

import numpy as np

from roughlog.config import conf

__all__ = ['Nonlinearity', 'Power', 'Linear', 'Log1p', 'Polynomial', 'NONLINEARITIES']


class Nonlinearity(abc.ABC):
    """
    A function ``g`` with ``g(0) = 0``, ``g' > 0`` on ``xi > 0`` and ``g -> infinity``.
    """
    family = None

    @abc.abstractmethod
    def _g(self, xi):
        """``g`` on ``xi >= 0``."""

    @abc.abstractmethod
    def _dg(self, xi):
        """``g'`` on ``xi >= 0``."""

    def g(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.sign(xi) * self._g(np.abs(xi))

    def dg(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self._dg(np.abs(xi))

    def envelope(self, xi):
        """
        ``g(xi) + g'(xi) xi``, the derivative of ``g(xi) xi``.
        """
        xi = np.asarray(xi, dtype=float)
        return self.g(xi) + self.dg(xi) * xi

    def max_envelope(self, k_bound, samples=None):
        """
        ``max_{0 <= xi <= k} envelope(xi)`` for each ``k`` in ``k_bound``.

        The envelope is sampled on ``conf.envelope_samples`` points of
        ``[0, max k]``, made monotone by a running maximum and evaluated at ``k``
        together with the exact value at ``k``.
        """
        k = np.asarray(k_bound, dtype=float)
        samples = conf.envelope_samples if samples is None else samples
        top = float(np.max(k)) if k.size else 0.0
        if top <= 0:
            return np.zeros_like(k)
        grid = np.linspace(0.0, top, samples)
        running = np.maximum.accumulate(self.envelope(grid))
        idx = np.clip(np.searchsorted(grid, k, side="right"), 1, samples) - 1
        return np.maximum(running[idx], self.envelope(np.clip(k, 0, None)))

    def inverse(self, y):
        """
        The ``xi >= 0`` with ``g(xi) = y`` for ``y >= 0``, by bisection.
        """
        y = float(y)
        if y <= 0:
            return 0.0
        hi = 1.0
        for _ in range(conf.search_cap_log2 * 4):
            if self._g(hi) >= y:
                break
            hi *= 2.0
        else:
            return np.inf
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if self._g(mid) < y:
                lo = mid
            else:
                hi = mid
        return lo

    def check_assumptions(self, large=1e6, samples=256):
        """
        Numerically check ``g(0) = 0``, ``g' > 0`` on ``(0, large]`` and growth to infinity.

        Returns
        -------
        `dict`
            One `bool` per assumption under the keys ``"zero"``, ``"increasing"``
            and ``"unbounded"``.
        """
        xi = np.geomspace(1e-6, large, samples)
        return {
            "zero": bool(self.g(0.0) == 0),
            "increasing": bool(np.all(self.dg(xi) > 0)),
            "unbounded": bool(self.g(large) > 10 * self.g(1.0)),
        }

    def to_config(self):
        return {"family": self.family}

    @staticmethod
    def from_config(config):
        config = dict(config)
        try:
            family = config.pop("family")
        except KeyError:
            raise ValueError("A nonlinearity needs a 'family'.")
        if family not in NONLINEARITIES:
            raise ValueError(f"Unknown nonlinearity family {family!r}; expected one of "
                             f"{sorted(NONLINEARITIES)}.")
        try:
            return NONLINEARITIES[family](**config)
        except TypeError as e:
            raise ValueError(f"Invalid parameters for nonlinearity {family!r}: {e}")

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.to_config().items() if k != "family")
        return f"{type(self).__name__}({params})"


class Power(Nonlinearity):
    """
    ``g(xi) = xi**p`` with ``p >= 1``.
    """
    family = "power"

    def __init__(self, p=2.0):
        if not isinstance(p, numbers.Real) or p < 1:
            raise ValueError(f"The power must be at least 1, got {p}.")
        self.p = float(p)

    def _g(self, xi):
        return xi ** self.p

    def _dg(self, xi):
        return self.p * xi ** (self.p - 1)

    def inverse(self, y):
        return float(y) ** (1 / self.p) if y > 0 else 0.0

    def to_config(self):
        return {"family": self.family, "p": self.p}


class Linear(Power):
    """
    ``g(xi) = xi``.
    """
    family = "linear"

    def __init__(self):
        super().__init__(1.0)

    def _dg(self, xi):
        return np.ones_like(xi)

    def inverse(self, y):
        return max(float(y), 0.0)

    def to_config(self):
        return {"family": self.family}


class Log1p(Nonlinearity):
    """
    ``g(xi) = log(1 + xi)``.
    """
    family = "log1p"

    def _g(self, xi):
        return np.log1p(xi)

    def _dg(self, xi):
        return 1.0 / (1.0 + xi)

    def inverse(self, y):
        return float(np.expm1(y)) if y > 0 else 0.0


class Polynomial(Nonlinearity):
    """
    ``g(xi) = sum_k c_k xi**k`` for ``k >= 1`` with nonnegative coefficients.

    Parameters
    ----------
    coefficients : sequence of `float`
        ``c_1, c_2, ...``; at least one must be positive.
    """
    family = "polynomial"

    def __init__(self, coefficients=(1.0, 1.0)):
        coefficients = np.asarray(coefficients, dtype=float).ravel()
        if coefficients.size == 0 or np.any(coefficients < 0) or not np.any(coefficients > 0):
            raise ValueError("Polynomial coefficients must be nonnegative and not all zero.")
        self.coefficients = coefficients
        # ascending powers with c_0 = 0
        self._poly = np.polynomial.Polynomial(np.concatenate([[0.0], coefficients]))
        self._deriv = self._poly.deriv()

    def _g(self, xi):
        return self._poly(xi)

    def _dg(self, xi):
        return self._deriv(xi)

    def to_config(self):
        return {"family": self.family, "coefficients": self.coefficients.tolist()}


NONLINEARITIES = {cls.family: cls for cls in (Power, Linear, Log1p, Polynomial)}
