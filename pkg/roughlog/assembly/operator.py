"""
Finite-volume assembly of the Laplacian and of elliptic operators in divergence form.

All operators are sparse CSR matrices acting on one value per interior cell.
The sign convention is that ``-A`` generates the evolution, so the Laplacian
is assembled as ``-Delta`` with a nonnegative diagonal.
"""
import textwrap
import warnings

import numpy as np
from scipy import sparse

from roughlog.assembly.coefficients import (BoundaryCondition, EllipticCoefficients,
                                            validate_ellipticity)
from roughlog.config import conf
from roughlog.domain.grid import _boundary_face_arrays, is_connected
from roughlog.logger import log
from roughlog.utils import io
from roughlog.utils.exceptions import (DenseCapError, PositivityRequiredError,
                                       RoughlogUserWarning)
from roughlog.utils.misc import as_cell_vector

__all__ = ['DiscreteOperator', 'assemble_laplacian', 'assemble_divergence_form',
           'add_potential', 'gershgorin_lower', 'write_matrix_market']

ROW_SUM_RTOL = 1e-13


def _is_symmetric(matrix):
    diff = (matrix - matrix.T).tocsr()
    return diff.nnz == 0 or float(abs(diff).max()) == 0


def _off_diagonal(matrix):
    off = matrix.tocoo()
    keep = off.row != off.col
    return off.data[keep]


def _is_zmatrix(matrix):
    off = _off_diagonal(matrix)
    return off.size == 0 or bool(off.max() <= 0)


def _row_sums_vanish(matrix):
    sums = np.abs(np.asarray(matrix.sum(axis=1)).ravel())
    scale = np.asarray(abs(matrix).sum(axis=1)).ravel()
    return bool(np.all(sums <= ROW_SUM_RTOL * scale))


class DiscreteOperator:
    """
    A sparse Z-matrix realization of an elliptic operator on a domain mask.

    The structural flags are computed from the matrix itself when not given.

    Parameters
    ----------
    matrix : `scipy.sparse.spmatrix` or array-like
        Square matrix of size ``mask.n``.
    mask : `~roughlog.domain.DomainMask`
    bc : `~roughlog.assembly.BoundaryCondition`
    name : `str`, optional
    symmetric, zmatrix, row_sum_zero : `bool`, optional
    """

    def __init__(self, matrix, mask, bc, name=None, symmetric=None, zmatrix=None,
                 row_sum_zero=None):
        matrix = sparse.csr_matrix(matrix, dtype=float)
        if matrix.shape != (mask.n, mask.n):
            raise ValueError(f"An operator on {mask.n} cells needs a square matrix of that "
                             f"size, got {matrix.shape}.")
        matrix.sum_duplicates()
        matrix.sort_indices()
        self._matrix = matrix
        self._mask = mask
        self._bc = bc
        self.name = name
        self._symmetric = _is_symmetric(matrix) if symmetric is None else bool(symmetric)
        self._zmatrix = _is_zmatrix(matrix) if zmatrix is None else bool(zmatrix)
        self._row_sum_zero = _row_sums_vanish(matrix) if row_sum_zero is None else bool(row_sum_zero)

    @property
    def matrix(self):
        return self._matrix

    @property
    def mask(self):
        return self._mask

    @property
    def bc(self):
        return self._bc

    @property
    def h(self):
        return self._mask.h

    @property
    def n(self):
        return self._mask.n

    @property
    def symmetric(self):
        return self._symmetric

    @property
    def zmatrix(self):
        return self._zmatrix

    @property
    def row_sum_zero(self):
        return self._row_sum_zero

    @property
    def flags(self):
        return {"symmetric": self._symmetric, "zmatrix": self._zmatrix,
                "row_sum_zero": self._row_sum_zero}

    @property
    def connected(self):
        return is_connected(self._mask)

    def diagonal(self):
        return self._matrix.diagonal()

    def shifted(self, omega):
        """
        The matrix ``omega I + A`` in CSC format, ready for factorization.
        """
        return (self._matrix + omega * sparse.identity(self.n, format="csr")).tocsc()

    def with_matrix(self, matrix, name=None):
        """
        A new operator on the same mask and boundary condition with flags recomputed.
        """
        return DiscreteOperator(matrix, self._mask, self._bc, name=name or self.name)

    def to_dense(self):
        """
        Dense copy of the matrix.

        Raises
        ------
        `~roughlog.utils.exceptions.DenseCapError`
            ``n`` exceeds ``conf.dense_cap``.
        """
        if self.n > conf.dense_cap:
            raise DenseCapError(f"Refusing a dense {self.n}x{self.n} matrix; conf.dense_cap is "
                                f"{conf.dense_cap}.")
        return self._matrix.toarray()

    def require_positivity(self, what="This operation"):
        """
        Refuse operators for which the positivity theory does not apply.
        """
        if not self._zmatrix:
            raise PositivityRequiredError(f"{what} needs a Z-matrix operator; {self!r} has "
                                          "positive off-diagonal entries.")
        if not self.connected:
            raise PositivityRequiredError(f"{what} needs a connected domain; the resolvent of "
                                          f"{self!r} is reducible.")

    def __matmul__(self, u):
        return self._matrix @ u

    def __eq__(self, other):
        if not isinstance(other, DiscreteOperator):
            return NotImplemented
        return (self._mask.same_as(other._mask) and self._bc == other._bc
                and (self._matrix != other._matrix).nnz == 0)

    def __str__(self):
        return textwrap.dedent(f"""\
            DiscreteOperator {self.name or ''}
            ----------------
            Cells: {self.n}
            Boundary condition: {self._bc!r}
            Nonzeros: {self._matrix.nnz}
            Symmetric: {self._symmetric}
            Z-matrix: {self._zmatrix}
            Zero row sums: {self._row_sum_zero}""")

    def __repr__(self):
        return f"{object.__repr__(self)}\n{str(self)}"


def _harmonic(left, right):
    total = left + right
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(total > 0, 2 * left * right / total, 0.0)


class _Triplets:
    """
    Accumulates COO entries in a fixed order.
    """

    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, rows, cols, vals):
        rows = np.asarray(rows)
        self.rows.append(rows)
        self.cols.append(np.asarray(cols))
        self.vals.append(np.broadcast_to(np.asarray(vals, dtype=float), rows.shape))

    def tocsr(self, n):
        if not self.rows:
            return sparse.csr_matrix((n, n))
        rows = np.concatenate(self.rows)
        cols = np.concatenate(self.cols)
        vals = np.concatenate(self.vals)
        return sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _assemble(mask, coeffs, bc):
    h = mask.h
    n = mask.n
    out = _Triplets()
    axes = "xy"[:mask.ndim]

    # diffusion through interior faces
    for d, axis in enumerate(axes):
        pairs = mask.edges[axis]
        k, l = pairs[:, 0], pairs[:, 1]
        w = _harmonic(coeffs.a[k, d], coeffs.a[l, d]) / h ** 2
        out.add(k, l, -w)
        out.add(l, k, -w)
        out.add(k, k, w)
        out.add(l, l, w)

    # diffusion through boundary faces
    cells, codes = _boundary_face_arrays(mask)
    axis_of = codes // 2
    a_face = coeffs.a[cells, axis_of]
    if bc.kind == "dirichlet":
        out.add(cells, cells, a_face / h ** 2)
    elif bc.kind == "robin":
        beta = bc.face_beta(mask)
        # the cell-to-ghost conductance a/h in series with beta
        out.add(cells, cells, a_face * beta / (h * (a_face + beta * h)))

    # conservative a_k u terms as a flux with velocity -a_k, upwinded
    if np.any(coeffs.a_k != 0):
        for d, axis in enumerate(axes):
            pairs = mask.edges[axis]
            k, l = pairs[:, 0], pairs[:, 1]
            v = -0.5 * (coeffs.a_k[k, d] + coeffs.a_k[l, d])
            vp, vm = np.maximum(v, 0), np.minimum(v, 0)
            out.add(k, k, vp / h)
            out.add(k, l, vm / h)
            out.add(l, k, -vp / h)
            out.add(l, l, -vm / h)
        if bc.kind == "dirichlet":
            # outflow through the boundary; inflow carries the zero ghost value
            v = -coeffs.a_k[cells, axis_of]
            sign = np.where(codes % 2 == 1, 1.0, -1.0)
            out.add(cells, cells, np.maximum(sign * v, 0) / h)

    # non-conservative drift b_k d_k u, upwinded
    if np.any(coeffs.b_k != 0):
        idx = np.arange(n)
        for d, axis in enumerate(axes):
            b = coeffs.b_k[:, d]
            for direction, upwind in ((f"-{axis}", b > 0), (f"+{axis}", b < 0)):
                neighbor = mask.neighbors(direction)
                inner = upwind & (neighbor >= 0)
                # a zero-gradient ghost cancels the difference entirely
                diag = upwind if bc.kind == "dirichlet" else inner
                out.add(idx[diag], idx[diag], np.abs(b[diag]) / h)
                out.add(idx[inner], neighbor[inner], -np.abs(b[inner]) / h)

    # mixed derivatives with a central cross stencil
    if coeffs.has_mixed:
        s = (coeffs.a_off[:, 0] + coeffs.a_off[:, 1]) / (4 * h ** 2)
        idx = np.arange(n)
        for di, dj, sign in ((1, 1, -1.0), (-1, -1, -1.0), (-1, 1, 1.0), (1, -1, 1.0)):
            neighbor = mask.neighbor_index(di, dj)
            keep = neighbor >= 0
            out.add(idx[keep], neighbor[keep], sign * s[keep])

    if np.any(coeffs.c != 0):
        out.add(np.arange(n), np.arange(n), coeffs.c)
    return out.tocsr(n)


def _check_connected(mask):
    if not is_connected(mask):
        warnings.warn(f"The mask {mask.name or ''} is not connected; the assembled operator "
                      "is reducible.", RoughlogUserWarning)


def assemble_laplacian(mask, bc):
    """
    The finite-volume negative Laplacian on ``mask``.

    Every interior face couples its two cells with ``1/h**2``. A boundary face
    adds ``1/h**2`` to the diagonal for Dirichlet conditions (the exterior cell
    center is the ghost node), nothing for Neumann conditions and
    ``beta / (h (1 + beta h))`` for Robin conditions, which recovers the
    Dirichlet stencil as ``beta`` grows.

    Parameters
    ----------
    mask : `~roughlog.domain.DomainMask`
    bc : `~roughlog.assembly.BoundaryCondition` or `str`

    Returns
    -------
    `DiscreteOperator`

    Raises
    ------
    `~roughlog.utils.exceptions.AssemblyError`
        A Robin condition misses values for some boundary faces.
    """
    if isinstance(bc, str):
        bc = BoundaryCondition(bc)
    _check_connected(mask)
    matrix = _assemble(mask, EllipticCoefficients.identity(mask), bc)
    op = DiscreteOperator(matrix, mask, bc, name=f"{bc.kind} laplacian")
    log.debug(f"Assembled {op.name} on {mask.n} cells ({matrix.nnz} nonzeros).")
    return op


def assemble_divergence_form(mask, coeffs, bc):
    """
    The finite-volume realization of an elliptic operator in divergence form.

    Diffusion uses harmonic face averages of ``a_kk``; the ``a_k`` and ``b_k``
    terms are upwinded so that off-diagonal entries stay nonpositive. Mixed
    derivatives use a central cross stencil, which may break the Z-matrix
    structure; the operator is then returned with ``zmatrix`` unset and a
    warning.

    Parameters
    ----------
    mask : `~roughlog.domain.DomainMask`
    coeffs : `~roughlog.assembly.EllipticCoefficients`
    bc : `~roughlog.assembly.BoundaryCondition` or `str`

    Returns
    -------
    `DiscreteOperator`
    """
    if isinstance(bc, str):
        bc = BoundaryCondition(bc)
    mask.check_same(coeffs.mask, "coefficient field")
    validate_ellipticity(coeffs)
    _check_connected(mask)
    op = DiscreteOperator(_assemble(mask, coeffs, bc), mask, bc, name="divergence form")
    if not op.zmatrix:
        warnings.warn("Mixed derivative terms produced positive off-diagonal entries; the "
                      "operator is not a Z-matrix and positivity based operations will refuse "
                      "it.", RoughlogUserWarning)
    return op


def add_potential(op, m, scale=1.0):
    """
    The operator ``A + scale * diag(m)``.

    Parameters
    ----------
    op : `DiscreteOperator`
    m : `~roughlog.assembly.Weight` or array-like
        One value per cell. Plain arrays may take any sign.
    scale : `float`
    """
    values = getattr(m, "values", None)
    if values is None:
        values = as_cell_vector(m, op.n, "potential")
    else:
        op.mask.check_same(m.mask, "weight")
    matrix = op.matrix + sparse.diags(scale * values, format="csr")
    return DiscreteOperator(matrix, op.mask, op.bc, name=op.name, symmetric=op.symmetric,
                            zmatrix=op.zmatrix)


def gershgorin_lower(op):
    """
    Lower bound of the real parts of the spectrum from Gershgorin discs.
    """
    matrix = op.matrix
    diag = matrix.diagonal()
    radius = np.asarray(abs(matrix).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min(diag - radius))


def write_matrix_market(op, path):
    """
    Write the operator matrix in MatrixMarket coordinate format.
    """
    comment = f"{op.name or 'operator'} on {op.n} cells, h={op.h!r}, bc={op.bc.kind}"
    io.write_matrix_market(op.matrix, path, comment=comment)
