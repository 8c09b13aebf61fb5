"""
Factorized resolvents ``(omega I + A)^-1`` of discrete operators.
"""
import numpy as np
from scipy.sparse import linalg as spla

from roughlog.config import conf
from roughlog.logger import log
from roughlog.utils.exceptions import SolverFailure
from roughlog.utils.misc import as_cell_vector

__all__ = ['Resolvent', 'resolvent_solve']


def _factorize(matrix, no_pivoting):
    if no_pivoting:
        # An M-matrix has an LU factorization without pivoting whose factors are
        # again M-matrices, so triangular solves keep nonnegative data nonnegative.
        return spla.splu(matrix, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                         options=dict(SymmetricMode=True))
    return spla.splu(matrix)


class Resolvent:
    """
    A sparse LU factorization of ``omega I + A``, reusable for many right hand sides.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    omega : `float`
    """

    def __init__(self, op, omega):
        self.op = op
        self.omega = float(omega)
        self._matrix = op.shifted(self.omega)
        self._norm = float(abs(self._matrix).sum(axis=1).max())
        try:
            self._lu = _factorize(self._matrix, op.zmatrix)
            if op.zmatrix and np.any(self._lu.U.diagonal() <= 0):
                # a non-positive pivot means omega I + A is not an M-matrix
                self._lu = _factorize(self._matrix, False)
        except RuntimeError as e:
            raise SolverFailure(f"omega I + A is singular for omega={self.omega}: {e}",
                                condition=np.inf)

    @property
    def matrix(self):
        return self._matrix

    def condition_estimate(self):
        """
        One-norm condition number estimate of ``omega I + A``.
        """
        n = self.op.n
        inverse = spla.LinearOperator((n, n), matvec=self._lu.solve,
                                      rmatvec=lambda x: self._lu.solve(x, trans="T"))
        return float(spla.onenormest(self._matrix) * spla.onenormest(inverse))

    def _check(self, u, f, matrix, backward):
        residual = np.linalg.norm(matrix @ u - f)
        scale = np.linalg.norm(f)
        if backward:
            scale += self._norm * np.linalg.norm(u)
        return residual <= conf.resolvent_rtol * scale, residual

    def solve(self, f, transpose=False, backward=False):
        """
        Solve ``(omega I + A) u = f`` (or the transposed system).

        One step of iterative refinement is taken when the first residual is
        above ``conf.resolvent_rtol * ||f||``.

        Parameters
        ----------
        f : `numpy.ndarray`
        transpose : `bool`, optional
        backward : `bool`, optional
            Measure the residual against ``||omega I + A|| ||u|| + ||f||`` instead
            of ``||f||``. Inverse iteration near a singular shift needs this.

        Raises
        ------
        `~roughlog.utils.exceptions.SolverFailure`
            The residual stays above the tolerance.
        """
        f = np.asarray(f, dtype=float)
        trans = "T" if transpose else "N"
        matrix = self._matrix.T if transpose else self._matrix
        u = self._lu.solve(f, trans=trans)
        ok, residual = self._check(u, f, matrix, backward)
        if not ok:
            u = u + self._lu.solve(f - matrix @ u, trans=trans)
            ok, residual = self._check(u, f, matrix, backward)
        if not ok or not np.all(np.isfinite(u)):
            condition = self.condition_estimate()
            raise SolverFailure(f"Resolvent solve with omega={self.omega} left residual "
                                f"{residual:.3e} (condition estimate {condition:.3e}).",
                                condition=condition)
        return u


def resolvent_solve(op, omega, f):
    """
    Solve ``(omega I + A) u = f``.

    For a Z-matrix operator, ``omega > -lambda_1`` and ``f >= 0`` the solution
    is nonnegative.

    Parameters
    ----------
    op : `~roughlog.assembly.DiscreteOperator`
    omega : `float`
    f : `float` or array-like
        One value per cell.

    Returns
    -------
    `numpy.ndarray`
    """
    f = as_cell_vector(f, op.n, "f")
    if not np.any(f):
        return np.zeros(op.n)
    u = Resolvent(op, omega).solve(f)
    log.debug(f"Resolvent solve with omega={omega} on {op.n} cells.")
    return u
