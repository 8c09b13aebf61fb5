"""
Semigroup level property checks.

Each check returns the measured violation as a `float`; wrap it with
`~roughlog.utils.results.CheckResult.from_violation` to record it.
"""
from collections import namedtuple

import numpy as np

from roughlog.assembly.operator import DiscreteOperator, add_potential
from roughlog.config import conf
from roughlog.logger import log
from roughlog.semigroup.evolution import Propagator, Stepper, dense_propagator, evolve
from roughlog.spectral.principal import principal_pair
from roughlog.utils.exceptions import PositivityRequiredError
from roughlog.utils.misc import as_cell_vector, positive_part
from roughlog.utils.parallel import parallel_map

__all__ = ['check_kato', 'check_sandwich', 'check_trotter', 'check_domination',
           'check_submarkov', 'check_positivity_improving', 'fit_ultracontractivity',
           'ultracontractivity_norms', 'check_semigroup_property', 'check_eigenflow',
           'DecayReport', 'cube_eigenfunction_decay']


def _require_zmatrix(op, what):
    if not op.zmatrix:
        raise PositivityRequiredError(f"{what} needs a Z-matrix operator.")


def check_kato(op, u):
    """
    The componentwise Kato inequality ``A u+ <= 1_{u > 0} A u``.

    Returns
    -------
    `float`
        ``max_i (A u+)_i - 1_{u_i > 0} (A u)_i``; nonpositive when the inequality holds.
    """
    _require_zmatrix(op, "check_kato")
    u = as_cell_vector(u, op.n, "u")
    left = op.matrix @ positive_part(u)
    right = np.where(u > 0, op.matrix @ u, 0.0)
    return float(np.max(left - right))


def check_sandwich(op, m, t):
    """
    The perturbation bounds ``exp(-wt) T(t) <= T_m(t) <= exp(wt) T(t)``, ``w = max |m|``.

    Returns
    -------
    `float`
        The largest entrywise violation of either bound.
    """
    op.mask.check_same(m.mask, "weight")
    omega = float(np.max(np.abs(m.values)))
    T = dense_propagator(op, t).matrix
    Tm = dense_propagator(add_potential(op, m), t).matrix
    lower = np.exp(-omega * t) * T - Tm
    upper = Tm - np.exp(omega * t) * T
    return float(max(lower.max(), upper.max()))


def check_trotter(op, m, t, n_steps):
    """
    Operator 2-norm distance between ``(T(t/n) exp(-m t/n))^n`` and ``T_m(t)``.
    """
    op.mask.check_same(m.mask, "weight")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1.")
    tau = t / n_steps
    factor = dense_propagator(op, tau).matrix * np.exp(-m.values * tau)[None, :]
    product = np.linalg.matrix_power(factor, n_steps)
    exact = dense_propagator(add_potential(op, m), t).matrix
    return float(np.linalg.norm(product - exact, 2))


def check_domination(op_lower, op_upper, t):
    """
    Entrywise domination ``0 <= T_lower(t) <= T_upper(t)``.

    Parameters
    ----------
    op_lower : `~roughlog.assembly.DiscreteOperator`
    op_upper : `~roughlog.assembly.DiscreteOperator` or `~roughlog.semigroup.Propagator`
        A propagator such as `~roughlog.semigroup.gaussian_kernel` is used as given.
    t : `float`

    Returns
    -------
    `float`
        The largest entry of ``T_lower - T_upper`` or of ``-T_lower``.
    """
    if isinstance(op_upper, DiscreteOperator):
        op_lower.mask.check_same(op_upper.mask, "operator")
        upper = dense_propagator(op_upper, t).matrix
    elif isinstance(op_upper, Propagator):
        if op_upper.matrix.shape != (op_lower.n, op_lower.n) or op_upper.t != t:
            raise ValueError("The upper propagator must act on the same cells at the same time.")
        upper = op_upper.matrix
    else:
        raise TypeError("op_upper must be a DiscreteOperator or a Propagator.")
    lower = dense_propagator(op_lower, t).matrix
    return float(max((lower - upper).max(), (-lower).max()))


def check_submarkov(op, t):
    """
    ``max_i (T(t) 1)_i - 1``; nonpositive for submarkovian semigroups.

    Uses the dense propagator up to ``conf.dense_cap`` cells and implicit Euler
    with 64 steps above it.
    """
    _require_zmatrix(op, "check_submarkov")
    ones = np.ones(op.n)
    if op.n <= conf.dense_cap:
        image = dense_propagator(op, t).matrix @ ones
    else:
        image = evolve(Stepper(op, t / 64), ones, t)
    return float(np.max(image - 1.0))


def check_positivity_improving(op, t, u0=None, cell=0):
    """
    Minimum entry after one implicit-Euler step of length ``t`` from a point mass.

    On a connected mask the result is strictly positive. On a disconnected mask
    it is zero off the component of ``cell``, a negative certificate rather
    than an error.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    t : `float`
    u0 : array-like, optional
        Nonnegative start vector instead of the point mass.
    cell : `int`, optional
        Where the point mass sits.
    """
    _require_zmatrix(op, "check_positivity_improving")
    if not t > 0:
        raise ValueError("t must be positive.")
    if u0 is None:
        u0 = np.zeros(op.n)
        u0[cell] = 1.0 / op.mask.grid.cell_volume
    else:
        u0 = as_cell_vector(u0, op.n, "u0")
        if np.any(u0 < 0) or not np.any(u0 > 0):
            raise ValueError("u0 must be nonnegative and nonzero.")
    return float(Stepper(op, t).step(u0).min())


def ultracontractivity_norms(op, t_list, workers=None):
    """
    ``||T(t)||_{2 -> inf}`` for each ``t``: the largest Euclidean row norm of the
    dense propagator scaled by ``h^(-N/2)``.
    """
    scale = op.mask.grid.cell_volume ** -0.5

    def norm(t):
        return float(np.max(np.linalg.norm(dense_propagator(op, t).matrix, axis=1)) * scale)

    return np.array(parallel_map(norm, list(t_list), workers))


def fit_ultracontractivity(op, t_list=None, window=True, workers=None):
    """
    Fit the exponent ``p`` in ``||T(t)||_{2 -> inf} ~ t^(-p)``.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    t_list : sequence of `float`, optional
        Defaults to 8 log-spaced times across the fit window.
    window : `bool`, optional
        Keep only times in ``[2 h^2, 0.1 / lambda_1]``, where the kernel is
        resolved and the principal mode does not yet dominate.

    Returns
    -------
    `float`
        The least-squares slope of ``log ||T(t)||`` against ``-log t``.

    Raises
    ------
    `ValueError`
        Fewer than four usable times.
    """
    h2 = op.mask.h ** 2
    lambda1 = principal_pair(op).lambda1 if op.connected and op.zmatrix else 0.0
    upper = 0.1 / lambda1 if lambda1 > 0 else np.inf
    if t_list is None:
        stop = upper if np.isfinite(upper) else 100 * h2
        t_list = np.geomspace(2 * h2, stop, 8)
    t_list = np.asarray(t_list, dtype=float)
    if window:
        t_list = t_list[(t_list >= 2 * h2 * (1 - 1e-12)) & (t_list <= upper * (1 + 1e-12))]
    if t_list.size < 4:
        raise ValueError(f"The fit needs at least 4 usable times, got {t_list.size}.")
    norms = ultracontractivity_norms(op, t_list, workers)
    slope = float(np.polyfit(-np.log(t_list), np.log(norms), 1)[0])
    log.debug(f"fit_ultracontractivity: exponent {slope:.4f} from {t_list.size} times.")
    return slope


def check_semigroup_property(op, t1, t2):
    """
    ``max |T(t1) T(t2) - T(t1 + t2)|`` over all entries.
    """
    product = dense_propagator(op, t1).matrix @ dense_propagator(op, t2).matrix
    return float(np.max(np.abs(product - dense_propagator(op, t1 + t2).matrix)))


def check_eigenflow(op, t, dt):
    """
    Euclidean distance between the implicit-Euler evolution of the principal
    eigenvector and ``exp(-lambda_1 t) u``; first order in ``dt``.
    """
    pair = principal_pair(op)
    evolved = evolve(Stepper(op, dt), pair.u, t)
    return float(np.linalg.norm(evolved - np.exp(-pair.lambda1 * t) * pair.u))


DecayReport = namedtuple("DecayReport", "observed per_axis total")
"""
Decay rate of the product-of-sines eigenfunction of a cube.

observed: the rate measured on the discrete flow.
per_axis: ``(pi / 2r)^2``.
total: ``N (pi / 2r)^2``, the rate of the product in N dimensions.
"""


def cube_eigenfunction_decay(op, r, t=0.01, center=None):
    """
    Measure the decay rate of ``prod_k cos(pi x_k / 2r)`` under the discrete flow.

    ``op`` should be the Dirichlet Laplacian of the cube ``center + (-r, r)^N``.
    The observed rate is ``-log(<phi, T(t) phi> / <phi, phi>) / t``.

    Returns
    -------
    `DecayReport`
    """
    mask = op.mask
    ndim = mask.ndim
    x = mask.centers[:, :ndim]
    center = x.mean(axis=0) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    phi = np.prod(np.cos(np.pi * (x - center) / (2 * r)), axis=1)
    if op.n <= conf.dense_cap:
        image = dense_propagator(op, t).matrix @ phi
    else:
        image = evolve(Stepper(op, t / 256), phi, t)
    observed = -np.log((phi @ image) / (phi @ phi)) / t
    per_axis = (np.pi / (2 * r)) ** 2
    return DecayReport(float(observed), per_axis, ndim * per_axis)
