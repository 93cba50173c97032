"""
Parameterized density operators, delta-mixing and the Frobenius cost.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from qnglab_cli.errors import (
    DimensionMismatch,
    InvalidBlochVector,
    InvalidParameter,
    NotHermitian,
)
from qnglab_cli.linalg import (
    SpectralDecomposition,
    as_matrix,
    frobenius_inner,
    hermitian_eig,
)

STATE_TOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, PSD, unit-trace matrix with its cached spectral decomposition."""
    matrix: np.ndarray
    spectral: SpectralDecomposition

    @classmethod
    def from_matrix(cls, M):
        A = as_matrix(M)
        spectral = hermitian_eig(A)
        trace = np.trace(A)
        if abs(trace - 1.0) > STATE_TOL:
            raise InvalidParameter(f"Density operator must have unit trace, got {trace.real:.12g}.")
        if spectral.eigenvalues[0] < -STATE_TOL:
            raise InvalidParameter(
                f"Density operator must be PSD, smallest eigenvalue is {spectral.eigenvalues[0]:.3e}."
            )
        return cls(matrix=A, spectral=spectral)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def eigenvalues(self):
        return self.spectral.eigenvalues


def bloch_to_density(bloch):
    """(1/2)(I + x sx + y sy + z sz) for a vector strictly inside the unit ball."""
    vec = np.asarray(bloch, dtype=float)
    if vec.shape != (3,) or not np.all(np.isfinite(vec)):
        raise InvalidBlochVector(f"Bloch vector must be three finite reals, got {bloch!r}.")
    if float(vec @ vec) >= 1.0:
        raise InvalidBlochVector(f"Bloch vector {vec.tolist()} must satisfy x^2 + y^2 + z^2 < 1.")
    return 0.5 * (PAULI_I + vec[0] * PAULI_X + vec[1] * PAULI_Y + vec[2] * PAULI_Z)


def rz(phi):
    return np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]], dtype=complex)


def ry(phi):
    c, s = np.cos(0.5 * phi), np.sin(0.5 * phi)
    return np.array([[c, -s], [s, c]], dtype=complex)


class StateFamily(ABC):
    """A map theta -> rho_theta with analytic partial derivatives."""

    n_params = 0
    is_quantum = True

    @abstractmethod
    def value(self, theta):
        """Returns the DensityOperator at theta."""

    @abstractmethod
    def partials(self, theta):
        """Returns [d_1 rho, ..., d_n rho] as Hermitian traceless arrays."""

    @abstractmethod
    def descriptor(self):
        """Plain-data description used in experiment metadata."""

    def check_theta(self, theta):
        vec = np.asarray(theta, dtype=float)
        if vec.shape != (self.n_params,) or not np.all(np.isfinite(vec)):
            raise InvalidParameter(
                f"Expected {self.n_params} finite parameters, got {np.shape(theta)}."
            )
        return vec


class RotationFamily(StateFamily):
    """
    rho_theta = U(theta) rho_ini U(theta)^dagger with
    U(theta) = Rz(theta_3) Ry(theta_2) Rz(theta_1).
    """

    n_params = 3

    def __init__(self, bloch):
        self.bloch = np.asarray(bloch, dtype=float)
        self.rho_ini = bloch_to_density(self.bloch)

    def _gates(self, theta):
        t = self.check_theta(theta)
        return rz(t[0]), ry(t[1]), rz(t[2])

    def unitary(self, theta):
        g1, g2, g3 = self._gates(theta)
        return g3 @ g2 @ g1

    def unitary_partials(self, theta):
        g1, g2, g3 = self._gates(theta)
        gz = -0.5j * PAULI_Z
        gy = -0.5j * PAULI_Y
        return [
            g3 @ g2 @ gz @ g1,
            g3 @ gy @ g2 @ g1,
            gz @ g3 @ g2 @ g1,
        ]

    def value(self, theta):
        U = self.unitary(theta)
        M = U @ self.rho_ini @ U.conj().T
        return DensityOperator.from_matrix(0.5 * (M + M.conj().T))

    def partials(self, theta):
        U = self.unitary(theta)
        out = []
        for dU in self.unitary_partials(theta):
            A = dU @ self.rho_ini @ U.conj().T
            out.append(A + A.conj().T)
        return out

    def descriptor(self):
        return {"family": "rotation", "bloch": [float(v) for v in self.bloch]}


def rotation_family_value(bloch, theta):
    return RotationFamily(bloch).value(theta)


def rotation_family_partials(bloch, theta):
    return RotationFamily(bloch).partials(theta)


def finite_difference_partials(family, theta, step=1e-6):
    """Central-difference partials of family.value; a test oracle only."""
    theta = np.asarray(theta, dtype=float)
    out = []
    for k in range(theta.shape[0]):
        shift = np.zeros_like(theta)
        shift[k] = step
        plus = family.value(theta + shift).matrix
        minus = family.value(theta - shift).matrix
        out.append((plus - minus) / (2.0 * step))
    return out


def _check_delta(delta):
    if not (0.0 <= delta < 1.0):
        raise InvalidParameter(f"Mixing weight must lie in [0, 1), got {delta}.")


def mix_with_identity(rho, delta):
    """(1 - delta) rho + (delta / N) I, reusing rho's eigenvectors."""
    _check_delta(delta)
    if delta == 0:
        return rho
    n = rho.dim
    matrix = (1.0 - delta) * rho.matrix + (delta / n) * np.eye(n)
    spectral = SpectralDecomposition(
        eigenvalues=(1.0 - delta) * rho.spectral.eigenvalues + delta / n,
        eigenvectors=rho.spectral.eigenvectors,
    )
    return DensityOperator(matrix=matrix, spectral=spectral)


def mix_partials(partials, delta):
    _check_delta(delta)
    return [(1.0 - delta) * X for X in partials]


def check_tangents(partials, dim):
    for k, X in enumerate(partials):
        X = np.asarray(X)
        if X.shape != (dim, dim):
            raise DimensionMismatch(f"Partial {k} has shape {X.shape}, expected {(dim, dim)}.")
        if np.linalg.norm(X - X.conj().T) > STATE_TOL * max(1.0, np.linalg.norm(X)):
            raise NotHermitian(f"Partial {k} is not Hermitian.")
        if abs(np.trace(X)) > STATE_TOL * max(1.0, np.linalg.norm(X)):
            raise InvalidParameter(f"Partial {k} is not traceless (trace {np.trace(X):.3e}).")


@dataclass(frozen=True)
class CostFunction:
    """L(theta) = Tr[(rho_theta - target)^dagger (rho_theta - target)]."""
    target: DensityOperator

    def value(self, rho):
        D = rho.matrix - self.target.matrix
        return float(frobenius_inner(D, D).real)

    def gradient(self, rho, partials):
        D = rho.matrix - self.target.matrix
        return np.array([2.0 * float(np.real(np.trace(X @ D))) for X in partials])


def cost_value(family, target, theta, delta=0.0):
    """Squared Frobenius distance, with both states delta-mixed when delta > 0."""
    rho = mix_with_identity(family.value(theta), delta)
    return CostFunction(mix_with_identity(target, delta)).value(rho)


def cost_gradient(family, target, theta, delta=0.0):
    rho = mix_with_identity(family.value(theta), delta)
    partials = mix_partials(family.partials(theta), delta)
    return CostFunction(mix_with_identity(target, delta)).gradient(rho, partials)
