"""
Natural-gradient step rules shared by the quantum and classical optimizers.

Both rules precondition the loss gradient with the inverse of a regularized
metric G, obtained through a Cholesky solve and never by explicit inversion.
"""
from enum import Enum

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from qnglab_cli.errors import (
    DimensionMismatch,
    InvalidParameter,
    SingularMetric,
    VanishingGradient,
)

PIVOT_TOL = 1e-14
RESIDUAL_TOL = 1e-10
DEFAULT_GRAD_TOL = 1e-12


class UpdateMode(Enum):
    TRUST = "trust"
    FIXED = "fixed"


def solve_spd(G, b):
    """
    Solves G x = b for symmetric positive definite G.

    Raises SingularMetric when a Cholesky pivot falls below
    PIVOT_TOL * trace(G) / n or when the residual check fails.
    """
    A = np.asarray(G, dtype=float)
    rhs = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"Metric must be square, got shape {A.shape}.")
    if rhs.shape != (A.shape[0],):
        raise DimensionMismatch(f"Right-hand side has shape {rhs.shape}, metric is {A.shape}.")
    n = A.shape[0]
    if n == 0:
        return np.zeros(0)

    try:
        factor, lower = cho_factor(A, lower=True)
    except np.linalg.LinAlgError as e:
        raise SingularMetric(f"Cholesky factorization failed: {e}") from e

    # pivots of the LDL^T form are the squared Cholesky diagonal
    pivots = np.diag(factor) ** 2
    floor = PIVOT_TOL * max(float(np.trace(A)), 0.0) / n
    if np.min(pivots) <= floor:
        raise SingularMetric(f"Cholesky pivot {np.min(pivots):.3e} is below {floor:.3e}.")

    x = cho_solve((factor, lower), rhs)
    residual = float(np.linalg.norm(A @ x - rhs))
    if residual > RESIDUAL_TOL * float(np.linalg.norm(rhs)):
        raise SingularMetric(f"Solve residual {residual:.3e} exceeds tolerance.")
    return x


def _natural_direction(G, grad):
    g = np.asarray(grad, dtype=float)
    x = solve_spd(G, g)
    q = float(g @ x)
    return g, x, q


def qng_step_trust_region(G, grad, epsilon, grad_tol=DEFAULT_GRAD_TOL):
    """
    Step that saturates the quadratic constraint (1/2) step^T G step = epsilon.

    Returns (step, predicted_decrease) with
        step               = -sqrt(2 eps / g^T G^-1 g) G^-1 g
        predicted_decrease = -sqrt(2 eps g^T G^-1 g)
    """
    if not epsilon > 0:
        raise InvalidParameter(f"Trust-region radius epsilon must be positive, got {epsilon}.")
    if np.linalg.norm(np.asarray(grad, dtype=float)) <= grad_tol:
        raise VanishingGradient("Gradient norm is below tolerance.")
    g, x, q = _natural_direction(G, grad)
    if not q > 0:
        raise SingularMetric(f"g^T G^-1 g = {q:.3e} is not positive; metric is not positive definite.")
    step = -np.sqrt(2.0 * epsilon / q) * x
    return step, -float(np.sqrt(2.0 * epsilon * q))


def qng_step_fixed(G, grad, eta):
    """step = -eta G^-1 g, predicted_decrease = -eta g^T G^-1 g."""
    if not eta >= 0:
        raise InvalidParameter(f"Learning rate eta must be non-negative, got {eta}.")
    g, x, q = _natural_direction(G, grad)
    return -eta * x, -eta * q


def natural_gradient_step(mode, G, grad, epsilon=None, eta=None, grad_tol=DEFAULT_GRAD_TOL):
    """Dispatches on UpdateMode; both modes stop on a vanishing gradient."""
    mode = UpdateMode(mode)
    if mode is UpdateMode.TRUST:
        return qng_step_trust_region(G, grad, epsilon, grad_tol=grad_tol)
    if np.linalg.norm(np.asarray(grad, dtype=float)) <= grad_tol:
        raise VanishingGradient("Gradient norm is below tolerance.")
    return qng_step_fixed(G, grad, eta)
