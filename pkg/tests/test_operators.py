import numpy as np
import pytest

from bornsim import operators as ops


def test_annihilation_nmax0_is_zero():
    a = ops.annihilation(0)
    assert a.shape == (1, 1)
    assert np.all(a == 0)


def test_annihilation_entries_nmax2():
    a = ops.annihilation(2)
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(np.sqrt(2.0))
    # all other entries vanish
    mask = np.ones_like(a, dtype=bool)
    mask[0, 1] = mask[1, 2] = False
    assert np.all(a[mask] == 0)


def test_number_operator_eigenvalue_on_fock_state():
    n_op = ops.number_op(2)
    ket2 = np.array([0.0, 0.0, 1.0])
    assert np.allclose(n_op @ ket2, 2.0 * ket2)


def test_commutator_identity_below_truncation_edge():
    a = ops.annihilation(5)
    comm = a @ a.conj().T - a.conj().T @ a
    # [a, a+] = 1 on n <= n_max - 1; the deviation sits at the top level only
    assert np.allclose(np.diag(comm)[:-1], 1.0, atol=1e-14)
    assert np.diag(comm)[-1] == pytest.approx(-5.0)


def test_tensor_product_identities():
    result = ops.tensor_product(ops.identity(2), ops.identity(3))
    assert np.array_equal(result, np.eye(6))


def test_tensor_product_sigma_z_spectrum():
    sigma_z = np.diag([1.0, -1.0])
    eigs = np.linalg.eigvalsh(ops.tensor_product(sigma_z, ops.identity(2)))
    assert np.allclose(sorted(eigs), [-1, -1, 1, 1])


def test_tensor_product_annihilates_vacuum_factor():
    a = ops.annihilation(1)
    big = ops.tensor_product(a, ops.identity(2))
    vac_anything = np.kron(np.array([1.0, 0.0]), np.array([0.3, 0.7]))
    assert np.allclose(big @ vac_anything, 0.0)


def test_tensor_product_associative():
    rng = np.random.default_rng(7)
    a, b, c = (rng.normal(size=(2, 2)) for _ in range(3))
    left = ops.tensor_product(ops.tensor_product(a, b), c)
    right = ops.tensor_product(a, ops.tensor_product(b, c))
    # entries are triple products; grouping only moves the last ulp
    assert np.allclose(left, right, rtol=1e-15, atol=0.0)


def test_tensor_product_dimension_cap():
    big = ops.identity(ops.MAX_DIM // 2 + 1)
    with pytest.raises(ops.DimensionError):
        ops.tensor_product(big, ops.identity(2))


def test_pure_density_basis_vector():
    rho = ops.pure_density(np.array([1.0, 0.0, 0.0]))
    expected = np.zeros((3, 3))
    expected[0, 0] = 1.0
    assert np.allclose(rho, expected)


def test_pure_density_equal_superposition():
    rho = ops.pure_density(np.array([1.0, 1.0]) / np.sqrt(2.0))
    assert np.allclose(rho, 0.25 * np.full((2, 2), 2.0))


def test_pure_density_rejects_unnormalized_and_reports_norm():
    with pytest.raises(ops.NormalizationError) as excinfo:
        ops.pure_density(np.array([2.0, 0.0]))
    assert excinfo.value.norm == pytest.approx(2.0)


def test_pure_density_idempotent():
    rng = np.random.default_rng(3)
    vec = rng.normal(size=4) + 1j * rng.normal(size=4)
    vec /= np.linalg.norm(vec)
    rho = ops.pure_density(vec)
    assert np.max(np.abs(rho @ rho - rho)) < 1e-10


def test_validate_density_rejects_bad_inputs():
    with pytest.raises(ops.DensityMatrixError):
        ops.validate_density(np.array([[0.5, 1.0], [0.0, 0.5]]))  # non-Hermitian
    with pytest.raises(ops.NormalizationError):
        ops.validate_density(np.diag([0.7, 0.7]))  # trace 1.4
    with pytest.raises(ops.DensityMatrixError):
        ops.validate_density(np.diag([1.5, -0.5]))  # negative eigenvalue
