"""
Dense complex matrix helpers and Hermitian spectral calculus.

Everything here works on small square numpy arrays (N up to a few dozen)
and returns new arrays; inputs are never modified.
"""
from dataclasses import dataclass

import numpy as np

from qnglab_cli.errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DomainError,
    NotHermitian,
)

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """
    Eigen-decomposition of a Hermitian matrix.

    eigenvalues are ascending; column k of eigenvectors belongs to eigenvalues[k].
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def to_eigenbasis(self, A):
        """Matrix elements <psi_i|A|psi_j>."""
        V = self.eigenvectors
        return V.conj().T @ A @ V

    def from_eigenbasis(self, A):
        V = self.eigenvectors
        return V @ A @ V.conj().T


def as_matrix(M):
    """Validates and converts M to a square complex array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatch(f"Expected a non-empty square matrix, got shape {A.shape}.")
    if not np.all(np.isfinite(A)):
        raise DomainError("Matrix has non-finite entries.")
    return A


def hermiticity_tolerance(A):
    return HERMITIAN_TOL * max(1.0, float(np.linalg.norm(A)))


def is_hermitian(M, tol=None):
    A = as_matrix(M)
    if tol is None:
        tol = hermiticity_tolerance(A)
    return float(np.linalg.norm(A - A.conj().T)) <= tol


def symmetrize(A):
    return 0.5 * (A + A.conj().T)


def hermitian_eig(M):
    """
    Spectral decomposition of a Hermitian matrix.

    The input is symmetrized as (M + M^dagger)/2 before decomposition so
    that roundoff-level asymmetry is absorbed.
    """
    A = as_matrix(M)
    if not is_hermitian(A):
        raise NotHermitian(
            f"Matrix is not Hermitian: |M - M^dagger|_F = {np.linalg.norm(A - A.conj().T):.3e}"
        )
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(A))
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(f"Hermitian eigensolver did not converge: {e}") from e
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def _as_decomposition(M):
    if isinstance(M, SpectralDecomposition):
        return M
    return hermitian_eig(M)


def spectral_apply(M, func):
    """
    Returns sum_i func(p_i)|psi_i><psi_i| for Hermitian M.

    M may be a matrix or an existing SpectralDecomposition. func receives the
    eigenvalue array and must be vectorized; any non-finite output is taken
    to mean an eigenvalue outside func's domain.
    """
    decomp = _as_decomposition(M)
    with np.errstate(all='ignore'):
        values = np.asarray(func(decomp.eigenvalues))
    if values.shape != decomp.eigenvalues.shape:
        raise DimensionMismatch("Spectral function must map the eigenvalue array elementwise.")
    if not np.all(np.isfinite(values)):
        bad = decomp.eigenvalues[~np.isfinite(values)]
        raise DomainError(f"Eigenvalues {bad.tolist()} lie outside the function's domain.")
    V = decomp.eigenvectors
    return (V * values) @ V.conj().T


def matrix_power(M, exponent):
    """
    Fractional power of a PSD matrix.

    Negative or fractional exponents require strictly positive eigenvalues
    (zero eigenvalues are allowed for positive exponents).
    """
    def power(p):
        if exponent > 0:
            return np.where(p >= 0, np.abs(p) ** exponent, np.nan)
        return np.where(p > 0, np.abs(p) ** exponent, np.nan)
    return spectral_apply(M, power)


def matrix_log(M):
    return spectral_apply(M, lambda p: np.where(p > 0, np.log(np.abs(p)), np.nan))


def frobenius_inner(A, B):
    """Tr[A^dagger B]."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise DimensionMismatch(f"Shapes differ: {A.shape} vs {B.shape}.")
    return complex(np.vdot(A, B))
