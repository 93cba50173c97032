"""
Classical and quantum Fisher metrics in parameter coordinates.

A metric is a real symmetric PSD numpy array of shape (n, n). Quantum metrics
are induced by a Petz function f through the pair coefficients

    c_ij = 1 / (p_j f(p_i / p_j))

in the eigenbasis {p_i, |psi_i>} of the state.
"""
import numpy as np

from qnglab_cli.errors import (
    DimensionMismatch,
    InvalidDistribution,
    InvalidParameter,
    NotHermitian,
    SingularState,
)
from qnglab_cli.linalg import SpectralDecomposition, is_hermitian
from qnglab_cli.petz import petz_eval
from qnglab_cli.states import check_tangents

EIGENVALUE_FLOOR = 1e-14
SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-9
LOEWNER_TOL = 1e-9
DISTRIBUTION_TOL = 1e-10


def _spectral(rho):
    if isinstance(rho, SpectralDecomposition):
        return rho
    return rho.spectral


def require_full_rank(rho, floor=EIGENVALUE_FLOOR):
    spectral = _spectral(rho)
    p_min = float(spectral.eigenvalues[0])
    if p_min < floor:
        raise SingularState(
            f"State has eigenvalue {p_min:.3e} below the floor {floor:.0e}; apply delta-mixing first."
        )
    return spectral


def pair_coefficients(rho, f):
    """Matrix c_ij = 1 / (p_j f(p_i / p_j))."""
    spectral = require_full_rank(rho)
    p = spectral.eigenvalues
    ratios = p[:, None] / p[None, :]
    return 1.0 / (p[None, :] * petz_eval(f, ratios))


def e_representation(rho, Xm, f):
    """
    f^{-1}(Delta_rho) applied to Xm rho^{-1}, returned in the original basis.
    """
    spectral = require_full_rank(rho)
    X = np.asarray(Xm, dtype=complex)
    if X.shape != (spectral.dim, spectral.dim):
        raise DimensionMismatch(f"Tangent shape {X.shape} does not match state dimension {spectral.dim}.")
    if not is_hermitian(X):
        raise NotHermitian("Tangent passed to the e-representation is not Hermitian.")
    Xt = spectral.to_eigenbasis(X)
    return spectral.from_eigenbasis(Xt * pair_coefficients(spectral, f))


def _finish_metric(G_complex):
    scale = max(1.0, float(np.max(np.abs(G_complex))) if G_complex.size else 1.0)
    residue = float(np.max(np.abs(G_complex.imag))) if G_complex.size else 0.0
    if residue > 1e-9 * scale:
        raise NotHermitian(f"Metric has imaginary residue {residue:.3e}; are the tangents Hermitian?")
    G = G_complex.real
    asymmetry = float(np.max(np.abs(G - G.T))) if G.size else 0.0
    if asymmetry > SYMMETRY_TOL * scale:
        raise NotHermitian(f"Metric asymmetry {asymmetry:.3e} exceeds tolerance.")
    return 0.5 * (G + G.T)


def quantum_fisher_metric(rho, partials, f, method="eigenbasis"):
    """
    G_ab = Re Tr[(d_a rho) e_rep(d_b rho)].

    method="eigenbasis" evaluates the double sum over eigenpairs directly;
    method="trace" builds each e-representation and takes the trace.
    Both routes agree to roundoff.
    """
    spectral = require_full_rank(rho)
    N = spectral.dim
    tangents = [np.asarray(X, dtype=complex) for X in partials]
    check_tangents(tangents, N)
    n = len(tangents)
    if n == 0:
        return np.zeros((0, 0))

    if method == "eigenbasis":
        C = pair_coefficients(spectral, f)
        Xt = np.stack([spectral.to_eigenbasis(X) for X in tangents])
        G = np.einsum('ij,aji,bij->ab', C, Xt, Xt)
    elif method == "trace":
        E = [e_representation(spectral, X, f) for X in tangents]
        G = np.array([[np.trace(tangents[a] @ E[b]) for b in range(n)] for a in range(n)])
    else:
        raise InvalidParameter(f"Unknown metric route '{method}'.")
    return _finish_metric(np.asarray(G, dtype=complex))


def check_metric(G):
    A = np.asarray(G, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"Metric must be square, got shape {A.shape}.")
    if A.size == 0:
        return A
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(A))):
        raise InvalidParameter("Metric is not symmetric.")
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    if np.linalg.eigvalsh(A)[0] < -PSD_TOL * scale:
        raise InvalidParameter("Metric is not positive semidefinite.")
    return A


def diagonal_metric(G):
    A = check_metric(G)
    return np.diag(np.diag(A))


def regularize_metric(G, xi):
    """(1 - xi) G + xi I."""
    if not (0.0 <= xi < 1.0):
        raise InvalidParameter(f"Metric regularizer xi must lie in [0, 1), got {xi}.")
    A = check_metric(G)
    return (1.0 - xi) * A + xi * np.eye(A.shape[0])


def check_distribution(p, tol=DISTRIBUTION_TOL):
    vec = np.asarray(p, dtype=float)
    if vec.ndim != 1 or vec.size == 0 or not np.all(np.isfinite(vec)):
        raise InvalidDistribution(f"Distribution must be a non-empty finite vector, got {p!r}.")
    if np.any(vec <= 0):
        raise InvalidDistribution("Distribution must be strictly positive.")
    if abs(vec.sum() - 1.0) > tol:
        raise InvalidDistribution(f"Distribution sums to {vec.sum():.12g}, not 1.")
    return vec


def classical_fisher_metric(p, partials):
    """G_ab = sum_x (d_a p)(x) (d_b p)(x) / p(x)."""
    vec = check_distribution(p)
    tangents = np.atleast_2d(np.asarray(partials, dtype=float))
    if tangents.shape[1] != vec.size:
        raise DimensionMismatch(f"Partials have length {tangents.shape[1]}, distribution has {vec.size}.")
    sums = tangents.sum(axis=1)
    if np.any(np.abs(sums) > DISTRIBUTION_TOL):
        raise InvalidDistribution("Each partial of a distribution must sum to zero.")
    G = (tangents / vec) @ tangents.T
    return 0.5 * (G + G.T)


def loewner_gap(A, B):
    """Smallest eigenvalue of A - B divided by max(1, |A|, |B|)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise DimensionMismatch(f"Metric shapes differ: {A.shape} vs {B.shape}.")
    D = A - B
    scale = max(1.0, float(np.linalg.norm(A, 2)), float(np.linalg.norm(B, 2)))
    return float(np.linalg.eigvalsh(0.5 * (D + D.T))[0]) / scale


def loewner_geq(A, B):
    """A >= B in Loewner order, up to a tolerance anchored to the larger operand."""
    return loewner_gap(A, B) >= -LOEWNER_TOL
