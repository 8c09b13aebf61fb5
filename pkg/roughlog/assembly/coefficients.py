"""
Boundary conditions and coefficient fields of elliptic operators in divergence form.
"""
import numbers

import numpy as np

from roughlog.domain.grid import _OFFSETS, _boundary_face_arrays
from roughlog.utils.exceptions import AssemblyError, EllipticityError
from roughlog.utils.misc import as_cell_vector

__all__ = ['BoundaryCondition', 'EllipticCoefficients', 'robin_condition',
           'validate_ellipticity']


class BoundaryCondition:
    """
    A Dirichlet, Neumann or Robin boundary condition.

    Parameters
    ----------
    kind : `str`
        ``"dirichlet"``, ``"neumann"`` or ``"robin"``.
    beta : `float` or array-like, optional
        Robin coefficient, one value per boundary face in the order of
        `~roughlog.domain.boundary_faces`, or a scalar for every face.
    beta_min : `float`, optional
        Declared lower bound of ``beta``. Defaults to the smallest value given.
    """
    KINDS = ("dirichlet", "neumann", "robin")

    def __init__(self, kind, beta=None, beta_min=None):
        kind = str(kind).lower()
        if kind not in self.KINDS:
            raise ValueError(f"Unknown boundary condition {kind!r}; expected one of {self.KINDS}.")
        if kind != "robin" and beta is not None:
            raise ValueError(f"A {kind} condition takes no beta.")
        self.kind = kind
        self.beta = None
        self.beta_min = None
        if kind == "robin" and beta is not None:
            beta = np.asarray(beta, dtype=float)
            if not np.all(np.isfinite(beta)):
                raise ValueError("Robin beta must be finite.")
            smallest = float(beta.min()) if beta.size else np.inf
            beta_min = smallest if beta_min is None else float(beta_min)
            if not beta_min > 0:
                raise ValueError(f"Robin conditions need beta >= beta_min > 0, got beta_min={beta_min}.")
            if smallest < beta_min:
                raise ValueError(f"Robin beta falls to {smallest}, below the declared "
                                 f"beta_min={beta_min}.")
            self.beta = beta
            self.beta_min = beta_min

    @classmethod
    def dirichlet(cls):
        return cls("dirichlet")

    @classmethod
    def neumann(cls):
        return cls("neumann")

    @classmethod
    def robin(cls, beta, beta_min=None):
        return cls("robin", beta, beta_min)

    def face_beta(self, mask):
        """
        The Robin coefficient of every boundary face of ``mask``.

        Raises
        ------
        `~roughlog.utils.exceptions.AssemblyError`
            A face has no value.
        """
        n_faces = _boundary_face_arrays(mask)[0].size
        if self.beta is None:
            raise AssemblyError("Robin condition without beta: every boundary face needs a value.")
        if self.beta.ndim == 0:
            return np.full(n_faces, float(self.beta))
        if self.beta.shape != (n_faces,):
            raise AssemblyError(f"Robin beta has {self.beta.size} values for {n_faces} "
                                "boundary faces.")
        return self.beta

    def to_config(self):
        config = {"kind": self.kind}
        if self.beta is not None:
            config["beta"] = self.beta.tolist()
            config["beta_min"] = self.beta_min
        return config

    def __eq__(self, other):
        if not isinstance(other, BoundaryCondition):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.beta is None or other.beta is None:
            return self.beta is other.beta
        return np.array_equal(self.beta, other.beta)

    def __repr__(self):
        if self.kind == "robin":
            beta = self.beta if self.beta is None or self.beta.ndim == 0 else f"<{self.beta.size} faces>"
            return f"BoundaryCondition('robin', beta={beta}, beta_min={self.beta_min})"
        return f"BoundaryCondition({self.kind!r})"


def robin_condition(mask, beta, beta_min=None):
    """
    Build a Robin condition by evaluating ``beta`` on the boundary faces of ``mask``.

    Parameters
    ----------
    mask : `~roughlog.domain.DomainMask`
    beta : `float` or callable
        A constant, or a function of the face-center coordinates ``(x, y)``
        returning one value per face.
    """
    cells, codes = _boundary_face_arrays(mask)
    if callable(beta):
        offsets = np.array([_OFFSETS[d] for d in mask.directions], dtype=float)
        centers = mask.centers[cells] + 0.5 * mask.h * offsets[codes]
        values = np.asarray(beta(centers[:, 0], centers[:, 1]), dtype=float)
        values = np.broadcast_to(values, cells.shape).copy()
    else:
        values = np.full(cells.size, float(beta))
    return BoundaryCondition.robin(values, beta_min)


def _per_axis(value, n, ndim, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full((n, ndim), float(arr))
    if arr.shape == (n,):
        return np.repeat(arr[:, None], ndim, axis=1)
    if arr.shape == (ndim,):
        return np.broadcast_to(arr, (n, ndim)).copy()
    if arr.shape != (n, ndim):
        raise ValueError(f"{name} must be a scalar or have shape ({n},), ({ndim},) or "
                         f"({n}, {ndim}); got {arr.shape}.")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite.")
    return arr.copy()


class EllipticCoefficients:
    """
    Coefficient fields of the operator

    ``Au = -sum_k d_k(sum_j a_jk d_j u + a_k u) + sum_k b_k d_k u + c u``.

    Parameters
    ----------
    mask : `~roughlog.domain.DomainMask`
    a : `float` or array-like
        Diagonal diffusion entries ``a_kk``: a scalar, one value per cell
        (isotropic), one value per axis, or shape ``(n, N)``.
    a_off : `float` or array-like, optional
        Off-diagonal entries in 2-D: one value per cell for ``a_12 = a_21`` or
        shape ``(n, 2)`` for ``(a_12, a_21)``.
    a_k, b_k : `float` or array-like, optional
        Lower order divergence and drift coefficients, shaped like ``a``.
    c : `float` or array-like, optional
        Potential, one value per cell.
    alpha : `float`, optional
        Declared ellipticity constant checked by `validate_ellipticity`.
    """

    def __init__(self, mask, a=1.0, a_off=0.0, a_k=0.0, b_k=0.0, c=0.0, alpha=None):
        n, ndim = mask.n, mask.ndim
        self.mask = mask
        self.a = _per_axis(a, n, ndim, "a")
        off = np.asarray(a_off, dtype=float)
        if off.ndim == 0:
            off = np.full((n, 2), float(off))
        elif off.shape == (n,):
            off = np.stack([off, off], axis=1)
        elif off.shape != (n, 2):
            raise ValueError(f"a_off must be a scalar or have shape ({n},) or ({n}, 2).")
        if ndim == 1 and np.any(off != 0):
            raise ValueError("Off-diagonal diffusion needs a 2-D domain.")
        if not np.all(np.isfinite(off)):
            raise ValueError("a_off must be finite.")
        self.a_off = off
        self.a_k = _per_axis(a_k, n, ndim, "a_k")
        self.b_k = _per_axis(b_k, n, ndim, "b_k")
        self.c = as_cell_vector(c, n, "c")
        if alpha is not None and not isinstance(alpha, numbers.Real):
            raise TypeError("alpha must be a real number.")
        self.alpha = alpha

    @classmethod
    def identity(cls, mask):
        """
        The coefficients of the negative Laplacian.
        """
        return cls(mask)

    @property
    def has_mixed(self):
        return bool(np.any(self.a_off != 0))

    @property
    def has_first_order(self):
        return bool(np.any(self.a_k != 0) or np.any(self.b_k != 0))

    def __repr__(self):
        return (f"EllipticCoefficients(n={self.mask.n}, mixed={self.has_mixed}, "
                f"first_order={self.has_first_order}, alpha={self.alpha})")


def validate_ellipticity(coeffs):
    """
    Smallest eigenvalue of the symmetrized diffusion tensor over all cells.

    Returns
    -------
    alpha_min : `float`

    Raises
    ------
    `~roughlog.utils.exceptions.EllipticityError`
        ``alpha_min <= 0``, or below the declared ``coeffs.alpha``.
    """
    a = coeffs.a
    if coeffs.mask.ndim == 1:
        smallest = a[:, 0]
    else:
        s = 0.5 * (coeffs.a_off[:, 0] + coeffs.a_off[:, 1])
        mean = 0.5 * (a[:, 0] + a[:, 1])
        radius = np.hypot(0.5 * (a[:, 0] - a[:, 1]), s)
        smallest = mean - radius
    cell = int(np.argmin(smallest))
    alpha_min = float(smallest[cell])
    if not alpha_min > 0:
        raise EllipticityError(f"Ellipticity fails at cell {cell}: the smallest eigenvalue "
                               f"of the diffusion tensor is {alpha_min}.", cell, alpha_min)
    if coeffs.alpha is not None and alpha_min < coeffs.alpha:
        raise EllipticityError(f"Ellipticity constant {coeffs.alpha} is not met at cell {cell} "
                               f"(smallest eigenvalue {alpha_min}).", cell, alpha_min)
    return alpha_min
