import numpy as np
import pytest
import scipy.io as sio
from numpy.testing import assert_allclose, assert_array_equal
from scipy import sparse

from roughlog import conf
from roughlog.assembly import (BoundaryCondition, DiscreteOperator, EllipticCoefficients,
                               add_potential, assemble_divergence_form, assemble_laplacian,
                               constant_weight, gershgorin_lower, robin_condition,
                               validate_ellipticity, write_matrix_market)
from roughlog.spectral import principal_pair
from roughlog.tests.helpers import assert_operators_equal, interval_mask
from roughlog.utils.exceptions import (AssemblyError, DenseCapError, EllipticityError,
                                       MaskMismatchError, PositivityRequiredError,
                                       RoughlogUserWarning)


def test_dirichlet_interval_is_second_difference(dirichlet_interval):
    h = dirichlet_interval.h
    n = dirichlet_interval.n
    expected = sparse.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]) / h ** 2
    assert_allclose(dirichlet_interval.to_dense(), expected.toarray(), rtol=1e-14)


def test_laplacian_flags(dirichlet_square, neumann_square, robin_square):
    assert dirichlet_square.flags == {"symmetric": True, "zmatrix": True, "row_sum_zero": False}
    assert neumann_square.row_sum_zero
    assert neumann_square.symmetric and neumann_square.zmatrix
    assert not robin_square.row_sum_zero
    assert robin_square.connected


def test_neumann_row_sums_vanish(neumann_square):
    assert_allclose(neumann_square @ np.ones(neumann_square.n), 0, atol=1e-10)


def test_robin_corner_diagonal(robin_square):
    h = robin_square.h
    beta = 2.0
    face = beta / (h * (1 + beta * h))
    # the corner cell has two interior and two boundary faces
    assert_allclose(robin_square.diagonal()[0], 2 / h ** 2 + 2 * face)


def test_robin_tends_to_dirichlet(square_16, dirichlet_square):
    stiff = assemble_laplacian(square_16, BoundaryCondition.robin(1e12))
    assert_allclose(stiff.to_dense(), dirichlet_square.to_dense(), rtol=1e-9)


def test_robin_per_face_values(square_16, robin_square):
    bc = robin_condition(square_16, lambda x, y: 2.0 + 0 * x)
    assert_operators_equal(assemble_laplacian(square_16, bc), robin_square, rtol=1e-14)


def test_robin_face_count_mismatch(square_16):
    with pytest.raises(AssemblyError):
        assemble_laplacian(square_16, BoundaryCondition.robin([1.0, 2.0]))


def test_robin_without_beta(square_16):
    with pytest.raises(AssemblyError):
        assemble_laplacian(square_16, "robin")


@pytest.mark.parametrize("kind, beta, beta_min", [
    ("periodic", None, None),
    ("dirichlet", 1.0, None),
    ("robin", [1.0, -1.0], None),
    ("robin", 1.0, 2.0),
    ("robin", np.inf, None),
])
def test_boundary_condition_invalid(kind, beta, beta_min):
    with pytest.raises(ValueError):
        BoundaryCondition(kind, beta, beta_min)


def test_boundary_condition_config():
    bc = BoundaryCondition.robin(0.5)
    assert bc.to_config() == {"kind": "robin", "beta": 0.5, "beta_min": 0.5}
    assert BoundaryCondition.dirichlet() == BoundaryCondition("Dirichlet")
    assert BoundaryCondition.neumann() != bc


def test_constant_diffusion_scales_laplacian(square_16, dirichlet_square):
    op = assemble_divergence_form(square_16, EllipticCoefficients(square_16, a=2.0), "dirichlet")
    assert_allclose(op.to_dense(), 2 * dirichlet_square.to_dense(), rtol=1e-14)
    assert op.zmatrix and op.symmetric


def test_variable_diffusion_is_symmetric(square_16, rng):
    a = rng.uniform(0.5, 2.0, square_16.n)
    op = assemble_divergence_form(square_16, EllipticCoefficients(square_16, a=a), "neumann")
    assert op.symmetric
    assert op.zmatrix
    assert op.row_sum_zero


def test_drift_keeps_zmatrix(square_16):
    coeffs = EllipticCoefficients(square_16, b_k=(3.0, -1.0), a_k=0.5)
    op = assemble_divergence_form(square_16, coeffs, "dirichlet")
    assert op.zmatrix
    assert not op.symmetric


def test_drift_eigenvalue():
    # -u'' + u' on (0, 1) with Dirichlet data has lambda_1 = pi^2 + 1/4
    mask = interval_mask(1 / 128)
    op = assemble_divergence_form(mask, EllipticCoefficients(mask, b_k=1.0), "dirichlet")
    assert_allclose(principal_pair(op).lambda1, np.pi ** 2 + 0.25, rtol=0.02)


@pytest.mark.parametrize("coefficients", [{}, {"b_k": (3.0, -1.0), "a_k": 0.5, "c": 2.0}])
def test_assembly_is_deterministic(lshape_16, coefficients):
    matrices = [assemble_divergence_form(lshape_16,
                                         EllipticCoefficients(lshape_16, **coefficients),
                                         "dirichlet").matrix.tocsc()
                for _ in range(2)]
    first, second = matrices
    assert_array_equal(first.data, second.data)
    assert_array_equal(first.indices, second.indices)
    assert_array_equal(first.indptr, second.indptr)


def test_mixed_derivatives_warn(square_16):
    coeffs = EllipticCoefficients(square_16, a_off=0.5)
    with pytest.warns(RoughlogUserWarning, match="not a Z-matrix"):
        op = assemble_divergence_form(square_16, coeffs, "dirichlet")
    assert not op.zmatrix
    with pytest.raises(PositivityRequiredError):
        op.require_positivity()


def test_ellipticity_failure(square_16):
    a = np.ones(square_16.n)
    a[17] = -1.0
    with pytest.raises(EllipticityError) as excinfo:
        assemble_divergence_form(square_16, EllipticCoefficients(square_16, a=a), "dirichlet")
    assert excinfo.value.cell == 17
    assert excinfo.value.alpha == -1.0


def test_ellipticity_declared_constant(square_16):
    assert_allclose(validate_ellipticity(EllipticCoefficients(square_16, a=1.0, a_off=0.5)), 0.5)
    with pytest.raises(EllipticityError):
        validate_ellipticity(EllipticCoefficients(square_16, a=1.0, alpha=2.0))


def test_coefficients_on_other_mask(square_16, square_32):
    with pytest.raises(MaskMismatchError):
        assemble_divergence_form(square_16, EllipticCoefficients(square_32), "dirichlet")


def test_coefficients_invalid_shape(square_16):
    with pytest.raises(ValueError):
        EllipticCoefficients(square_16, a=np.ones(3))


def test_mixed_derivatives_need_two_dimensions(interval_64):
    with pytest.raises(ValueError):
        EllipticCoefficients(interval_64, a_off=1.0)


def test_disconnected_mask_warns(two_squares):
    with pytest.warns(RoughlogUserWarning, match="not connected"):
        op = assemble_laplacian(two_squares, "dirichlet")
    assert not op.connected
    with pytest.raises(PositivityRequiredError):
        op.require_positivity()


def test_dense_cap(square_32):
    op = assemble_laplacian(square_32, "dirichlet")
    with pytest.raises(DenseCapError):
        op.to_dense()
    with conf.set_temp("dense_cap", 1000):
        assert op.to_dense().shape == (961, 961)


def test_add_potential(dirichlet_square, unit_weight):
    op = add_potential(dirichlet_square, unit_weight, scale=3.0)
    assert_allclose(op.diagonal() - dirichlet_square.diagonal(), 3.0)
    assert op.flags == dirichlet_square.flags
    assert_allclose(gershgorin_lower(op), 3.0)


def test_add_signed_potential(neumann_square):
    c = np.full(neumann_square.n, -2.0)
    op = add_potential(neumann_square, c)
    assert_allclose(op @ np.ones(op.n), -2.0, atol=1e-10)


def test_add_potential_other_mask(dirichlet_square, square_32):
    with pytest.raises(MaskMismatchError):
        add_potential(dirichlet_square, constant_weight(square_32))


def test_gershgorin_laplacian(square_operator):
    assert gershgorin_lower(square_operator) >= -1e-9


def test_shifted(dirichlet_square):
    shifted = dirichlet_square.shifted(5.0)
    assert sparse.isspmatrix_csc(shifted)
    assert_allclose(shifted.diagonal(), dirichlet_square.diagonal() + 5.0)


def test_with_matrix_recomputes_flags(dirichlet_square):
    flipped = dirichlet_square.with_matrix(-dirichlet_square.matrix)
    assert not flipped.zmatrix
    assert flipped.mask is dirichlet_square.mask


def test_operator_shape_mismatch(square_16):
    with pytest.raises(ValueError):
        DiscreteOperator(np.eye(3), square_16, BoundaryCondition.dirichlet())


def test_operator_equality(square_16, dirichlet_square, neumann_square):
    assert assemble_laplacian(square_16, "dirichlet") == dirichlet_square
    assert dirichlet_square != neumann_square


def test_operator_str(dirichlet_square):
    text = str(dirichlet_square)
    assert "Cells: 225" in text
    assert "Z-matrix: True" in text


def test_write_matrix_market(tmp_path, dirichlet_lshape):
    path = tmp_path / "lshape.mtx"
    write_matrix_market(dirichlet_lshape, path)
    matrix = sio.mmread(str(path))
    assert_allclose(matrix.toarray(), dirichlet_lshape.to_dense())
