"""
Classical natural gradient over finite distributions.

The classical Fisher metric does not depend on the Renyi order, so the
natural-gradient step computed here is the same for every alpha.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.special import softmax

from qnglab_cli.errors import InvalidParameter
from qnglab_cli.metrics import check_distribution, classical_fisher_metric, regularize_metric
from qnglab_cli.steps import DEFAULT_GRAD_TOL, UpdateMode, natural_gradient_step


class DistributionFamily(ABC):
    """A map theta -> p_theta over N outcomes with analytic partials."""

    n_params = 0
    n_outcomes = 0
    is_quantum = False

    @abstractmethod
    def value(self, theta):
        """Returns p_theta as a strictly positive vector summing to one."""

    @abstractmethod
    def partials(self, theta):
        """Returns an (n_params, n_outcomes) array whose rows sum to zero."""

    @abstractmethod
    def descriptor(self):
        pass

    def check_theta(self, theta):
        vec = np.asarray(theta, dtype=float)
        if vec.shape != (self.n_params,) or not np.all(np.isfinite(vec)):
            raise InvalidParameter(
                f"Expected {self.n_params} finite parameters, got {np.shape(theta)}."
            )
        return vec


class SoftmaxFamily(DistributionFamily):
    """Categorical distribution with logits theta: p_x = exp(theta_x) / sum_y exp(theta_y)."""

    def __init__(self, n_outcomes):
        if n_outcomes < 2:
            raise InvalidParameter(f"Softmax family needs at least two outcomes, got {n_outcomes}.")
        self.n_outcomes = int(n_outcomes)
        self.n_params = int(n_outcomes)

    def value(self, theta):
        return softmax(self.check_theta(theta))

    def partials(self, theta):
        # d_i p_x = p_x (delta_ix - p_i)
        p = self.value(theta)
        return np.diag(p) - np.outer(p, p)

    def descriptor(self):
        return {"family": "softmax", "outcomes": self.n_outcomes}


def softmax_family(theta):
    """Returns (p, partials) of the softmax family at the logits theta."""
    theta = np.asarray(theta, dtype=float)
    family = SoftmaxFamily(theta.shape[0])
    return family.value(theta), family.partials(theta)


def mix_distribution(p, delta):
    """(1 - delta) p + delta / N, the classical analogue of identity mixing."""
    if not (0.0 <= delta < 1.0):
        raise InvalidParameter(f"Mixing weight must lie in [0, 1), got {delta}.")
    p = np.asarray(p, dtype=float)
    if delta == 0:
        return p
    return (1.0 - delta) * p + delta / p.size


@dataclass(frozen=True)
class DistributionCost:
    """L(theta) = sum_x (p_theta(x) - q(x))^2."""
    target: np.ndarray

    def value(self, p):
        d = np.asarray(p, dtype=float) - self.target
        return float(d @ d)

    def gradient(self, p, partials):
        d = np.asarray(p, dtype=float) - self.target
        return 2.0 * (np.asarray(partials, dtype=float) @ d)


def classical_ng_step(family, grad, theta, mode=UpdateMode.TRUST, epsilon=None, eta=None,
                      alpha=None, xi=0.0, grad_tol=DEFAULT_GRAD_TOL):
    """
    One natural-gradient step on a distribution family.

    alpha is accepted for symmetry with the quantum optimizer and has no
    effect: the classical Fisher metric is the same for every Renyi order.
    """
    theta = family.check_theta(theta)
    p = check_distribution(family.value(theta))
    G = regularize_metric(classical_fisher_metric(p, family.partials(theta)), xi)
    return natural_gradient_step(mode, G, grad, epsilon=epsilon, eta=eta, grad_tol=grad_tol)
