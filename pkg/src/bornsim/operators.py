"""Dense operator algebra on the truncated dot x photon space.

Everything downstream (Hamiltonians, dissipators, observables) is assembled
from the small set of matrices built here.  All operators are dense complex
numpy arrays; component dimensions never exceed a few hundred, so sparse
storage would buy nothing.
"""

import numpy as np

# Hard cap on the dimension of any tensor-product result.  Protects against
# accidentally kron-ing full-system operators together.
MAX_DIM = 4096

HERMITIAN_TOL = 1e-12
DENSITY_HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
EIGENVALUE_TOL = -1e-8


class DimensionError(ValueError):
    """Operator dimensions are incompatible or exceed MAX_DIM."""


class NormalizationError(ValueError):
    """A state vector or density matrix is not normalized."""

    def __init__(self, norm, message=None):
        self.norm = norm
        super().__init__(message or f"state not normalized: norm = {norm!r}")


class DensityMatrixError(ValueError):
    """A matrix fails the density-matrix invariants."""


def annihilation(n_max: int) -> np.ndarray:
    """Bosonic lowering operator on the Fock space {|0>, ..., |n_max>}.

    Matrix elements a[n-1, n] = sqrt(n); the top level |n_max> is simply
    truncated, so [a, a+] = 1 holds only on n <= n_max - 1.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    dim = n_max + 1
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def creation(n_max: int) -> np.ndarray:
    return annihilation(n_max).conj().T


def number_op(n_max: int) -> np.ndarray:
    a = annihilation(n_max)
    return a.conj().T @ a


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with a guard on the resulting dimension."""
    dim = a.shape[0] * b.shape[0]
    if dim > MAX_DIM:
        raise DimensionError(
            f"tensor product dimension {dim} exceeds MAX_DIM = {MAX_DIM}"
        )
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def pure_density(amplitudes: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi| from a normalized amplitude vector."""
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-8:
        raise NormalizationError(norm)
    return np.outer(psi, psi.conj())


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def validate_density(rho: np.ndarray) -> np.ndarray:
    """Check the density-matrix invariants; returns rho unchanged.

    Hermitian to 1e-10, trace within 1e-8 of one, eigenvalues >= -1e-8.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
    if not is_hermitian(rho, DENSITY_HERMITIAN_TOL):
        dev = float(np.max(np.abs(rho - rho.conj().T)))
        raise DensityMatrixError(f"not Hermitian: max |rho - rho^dag| = {dev:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise NormalizationError(tr, f"trace deviates from 1: {tr!r}")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < EIGENVALUE_TOL:
        raise DensityMatrixError(f"negative eigenvalue {evals.min():.3e}")
    return rho
