"""
Time stepping and dense realizations of the semigroup ``T(t) = exp(-tA)``.
"""
import math
from collections import namedtuple

import numpy as np
from scipy import linalg

from roughlog.config import conf
from roughlog.logger import log
from roughlog.spectral.resolvent import Resolvent
from roughlog.utils.exceptions import DenseCapError

__all__ = ['Stepper', 'evolve', 'Propagator', 'dense_propagator', 'gaussian_kernel']


class Stepper:
    """
    A one-step scheme for ``u' = -A u``.

    Implicit Euler applies ``(I + dt A)^-1`` per step, which maps nonnegative
    vectors to nonnegative vectors for Z-matrix operators. Crank-Nicolson is
    second order but may undershoot.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    dt : `float`
    scheme : `str`, optional
        ``"implicit-euler"`` (default) or ``"crank-nicolson"``.
    """
    SCHEMES = ("implicit-euler", "crank-nicolson")

    def __init__(self, op, dt, scheme="implicit-euler"):
        if not dt > 0:
            raise ValueError(f"The time step must be positive, got {dt}.")
        if scheme not in self.SCHEMES:
            raise ValueError(f"Unknown scheme {scheme!r}; expected one of {self.SCHEMES}.")
        self.op = op
        self.dt = float(dt)
        self.scheme = scheme
        # (I + c dt A) = c dt ((1 / (c dt)) I + A)
        self._factor = 1.0 / self.dt if scheme == "implicit-euler" else 2.0 / self.dt
        self._resolvent = Resolvent(op, self._factor)

    def step(self, u):
        u = np.asarray(u, dtype=float)
        if self.scheme == "implicit-euler":
            return self._resolvent.solve(self._factor * u)
        return self._resolvent.solve(self._factor * u - self.op.matrix @ u)

    def __repr__(self):
        return f"Stepper(dt={self.dt}, scheme={self.scheme!r}, n={self.op.n})"


def evolve(stepper, u0, t):
    """
    Advance ``u0`` to time ``t``.

    ``ceil(t / dt)`` steps are taken; when ``t`` is not a multiple of
    ``stepper.dt`` the step is shortened so that they end exactly at ``t``.

    Returns
    -------
    `numpy.ndarray`
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}.")
    u = np.array(u0, dtype=float)
    if t == 0:
        return u
    n_steps = max(1, math.ceil(t / stepper.dt - 1e-12))
    if not math.isclose(n_steps * stepper.dt, t, rel_tol=1e-12):
        stepper = Stepper(stepper.op, t / n_steps, stepper.scheme)
    for _ in range(n_steps):
        u = stepper.step(u)
    log.debug(f"evolve: {n_steps} {stepper.scheme} steps of {stepper.dt:.3e} to t={t}.")
    return u


class Propagator(namedtuple("Propagator", "matrix t accuracy")):
    """
    A dense matrix approximating ``T(t)``.

    Parameters
    ----------
    matrix : `numpy.ndarray`
    t : `float`
    accuracy : `float`
        Estimated relative error, from comparing with ``T(t/2)^2``.
    """
    __slots__ = ()

    def apply(self, u):
        return self.matrix @ u

    @property
    def min_entry(self):
        return float(self.matrix.min())


def dense_propagator(op, t):
    """
    ``exp(-tA)`` by scaling and squaring.

    Raises
    ------
    `~roughlog.utils.exceptions.DenseCapError`
        ``op.n > conf.dense_cap``.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}.")
    dense = op.to_dense()
    if t == 0:
        return Propagator(np.eye(op.n), 0.0, 0.0)
    matrix = linalg.expm(-t * dense)
    half = linalg.expm(-0.5 * t * dense)
    norm = np.linalg.norm(matrix, 1)
    accuracy = float(np.linalg.norm(matrix - half @ half, 1) / norm) if norm > 0 else 0.0
    return Propagator(matrix, float(t), accuracy)


def gaussian_kernel(mask, t):
    """
    The free heat kernel sampled on the cell centers of ``mask``.

    Entry ``(i, j)`` is ``(4 pi t)^(-N/2) exp(-|x_i - x_j|^2 / 4t) h^N``.

    Returns
    -------
    `Propagator`
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}.")
    if mask.n > conf.dense_cap:
        raise DenseCapError(f"Refusing a dense {mask.n}x{mask.n} kernel; conf.dense_cap is "
                            f"{conf.dense_cap}.")
    ndim = mask.ndim
    x = mask.centers[:, :ndim]
    dist2 = np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=-1)
    matrix = (4 * np.pi * t) ** (-ndim / 2) * np.exp(-dist2 / (4 * t)) * mask.h ** ndim
    return Propagator(matrix, float(t), 0.0)
