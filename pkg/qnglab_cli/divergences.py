"""
Rescaled Renyi divergences, their KL limits, and the finite-difference
bridge from a divergence to the metric it induces.

    D_alpha(p_bar || p)     = ln sum_x p_bar^alpha p^(1 - alpha) / (alpha (alpha - 1))
    D_alpha(rho_bar || rho) = ln Tr[(rho^s rho_bar rho^s)^alpha] / (alpha (alpha - 1)),
                              s = (1 - alpha) / (2 alpha)
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import logsumexp, rel_entr

from qnglab_cli.classical import mix_distribution
from qnglab_cli.errors import InvalidParameter, SingularState
from qnglab_cli.linalg import hermitian_eig, matrix_log, spectral_apply, symmetrize
from qnglab_cli.metrics import check_distribution, require_full_rank
from qnglab_cli.states import DensityOperator, mix_with_identity

DEFAULT_FD_STEP = 1e-3


class DivergenceFamily(Enum):
    CLASSICAL_RENYI = "classical_renyi"
    QUANTUM_SANDWICHED_RENYI = "quantum_sandwiched_renyi"
    CLASSICAL_KL = "classical_kl"
    QUANTUM_KL = "quantum_kl"


RENYI_FAMILIES = (DivergenceFamily.CLASSICAL_RENYI, DivergenceFamily.QUANTUM_SANDWICHED_RENYI)
QUANTUM_FAMILIES = (DivergenceFamily.QUANTUM_SANDWICHED_RENYI, DivergenceFamily.QUANTUM_KL)


def _check_renyi_alpha(alpha):
    if alpha is None or not np.isfinite(alpha):
        raise InvalidParameter(f"Renyi divergences need a finite alpha, got {alpha!r}.")
    if alpha == 0 or alpha == 1:
        raise InvalidParameter(f"alpha = {alpha} is a singular prefactor for the rescaled Renyi divergence.")
    return float(alpha)


@dataclass(frozen=True)
class DivergenceSpec:
    family: DivergenceFamily
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.family in RENYI_FAMILIES:
            _check_renyi_alpha(self.alpha)

    @property
    def is_quantum(self):
        return self.family in QUANTUM_FAMILIES

    def evaluate(self, first, second):
        if self.family is DivergenceFamily.CLASSICAL_RENYI:
            return classical_renyi(first, second, self.alpha)
        if self.family is DivergenceFamily.QUANTUM_SANDWICHED_RENYI:
            return quantum_sandwiched_renyi(first, second, self.alpha)
        if self.family is DivergenceFamily.CLASSICAL_KL:
            return classical_kl(first, second)
        return quantum_kl(first, second)


def _as_state(rho):
    if isinstance(rho, DensityOperator):
        return rho
    return DensityOperator.from_matrix(rho)


def classical_renyi(p, q, alpha):
    alpha = _check_renyi_alpha(alpha)
    p = check_distribution(p)
    q = check_distribution(q)
    if p.shape != q.shape:
        raise InvalidParameter(f"Distributions differ in length: {p.size} vs {q.size}.")
    log_sum = logsumexp(alpha * np.log(p) + (1.0 - alpha) * np.log(q))
    return float(log_sum / (alpha * (alpha - 1.0)))


def classical_kl(p, q):
    p = check_distribution(p)
    q = check_distribution(q)
    if p.shape != q.shape:
        raise InvalidParameter(f"Distributions differ in length: {p.size} vs {q.size}.")
    return float(np.sum(rel_entr(p, q)))


def quantum_sandwiched_renyi(rho_bar, rho, alpha):
    alpha = _check_renyi_alpha(alpha)
    rho_bar = _as_state(rho_bar)
    rho = _as_state(rho)
    require_full_rank(rho_bar)
    require_full_rank(rho)
    s = (1.0 - alpha) / (2.0 * alpha)
    R = spectral_apply(rho.spectral, lambda p: p ** s)
    inner = symmetrize(R @ rho_bar.matrix @ R)
    # roundoff can leave -1e-17 eigenvalues that break fractional powers
    lam = np.clip(hermitian_eig(inner).eigenvalues, 0.0, None)
    if alpha < 0 and np.any(lam == 0):
        raise SingularState("Sandwiched operator is singular; negative alpha needs full rank.")
    return float(np.log(np.sum(lam ** alpha)) / (alpha * (alpha - 1.0)))


def quantum_kl(rho_bar, rho):
    """Umegaki relative entropy Tr[rho_bar (ln rho_bar - ln rho)]."""
    rho_bar = _as_state(rho_bar)
    rho = _as_state(rho)
    require_full_rank(rho_bar)
    require_full_rank(rho)
    diff = matrix_log(rho_bar.spectral) - matrix_log(rho.spectral)
    return float(np.real(np.trace(rho_bar.matrix @ diff)))


def fd_metric_from_divergence(spec, family, theta, h=DEFAULT_FD_STEP, delta=0.0):
    """
    Hessian of D(x(theta_bar) || x(theta)) in theta_bar at theta_bar = theta,
    by central second differences with step h per coordinate.

    Stencil states are delta-mixed before evaluation when delta > 0.
    """
    if not h > 0:
        raise InvalidParameter(f"Stencil step must be positive, got {h}.")
    theta = family.check_theta(theta)

    if spec.is_quantum:
        def point(t):
            return mix_with_identity(family.value(t), delta)
    else:
        def point(t):
            return mix_distribution(family.value(t), delta)

    base = point(theta)

    def D(shift):
        return spec.evaluate(point(theta + shift), base)

    n = theta.shape[0]
    steps = h * np.eye(n)
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            ei, ej = steps[i], steps[j]
            G[i, j] = (D(ei + ej) - D(ei - ej) - D(-ei + ej) + D(-ei - ej)) / (4.0 * h * h)
            G[j, i] = G[i, j]
    return G
