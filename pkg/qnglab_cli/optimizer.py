"""
The natural-gradient iteration for state and distribution families.

Each iteration mixes the state with the identity (delta), decomposes it,
builds the metric for the configured Petz function (full or diagonal),
regularizes it (xi), takes one step and updates theta.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from qnglab_cli.classical import DistributionCost, mix_distribution
from qnglab_cli.errors import InvalidParameter, QngError, VanishingGradient
from qnglab_cli.metrics import (
    classical_fisher_metric,
    diagonal_metric,
    quantum_fisher_metric,
    regularize_metric,
)
from qnglab_cli.petz import PetzFunction
from qnglab_cli.states import CostFunction, DensityOperator, mix_partials, mix_with_identity
from qnglab_cli.steps import DEFAULT_GRAD_TOL, UpdateMode, natural_gradient_step

DEFAULT_MAX_ITERS = 10000

STATUS_CONVERGED = "converged"
STATUS_MAX_ITERS = "max_iters"
STATUS_ERROR = "error"


@dataclass
class OptimizerConfig:
    mode: UpdateMode = UpdateMode.TRUST
    epsilon: float = 1e-8
    eta: float = 5e-4
    petz: PetzFunction = field(default_factory=lambda: PetzFunction.from_alpha(0.5))
    xi: float = 1e-3
    delta: float = 1e-3
    diagonal: bool = False
    max_iters: int = DEFAULT_MAX_ITERS
    grad_tol: float = DEFAULT_GRAD_TOL
    mix_cost: bool = True

    def __post_init__(self):
        try:
            self.mode = UpdateMode(self.mode)
        except ValueError:
            raise InvalidParameter(f"Unknown update mode '{self.mode}'; use 'trust' or 'fixed'.")
        self.petz = PetzFunction.parse(self.petz)
        if self.mode is UpdateMode.TRUST and not self.epsilon > 0:
            raise InvalidParameter(f"epsilon must be positive, got {self.epsilon}.")
        if self.mode is UpdateMode.FIXED and not self.eta > 0:
            raise InvalidParameter(f"eta must be positive, got {self.eta}.")
        for name in ("xi", "delta"):
            value = getattr(self, name)
            if not (0.0 <= value < 1.0):
                raise InvalidParameter(f"{name} must lie in [0, 1), got {value}.")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidParameter(f"max_iters must be a positive integer, got {self.max_iters}.")
        self.max_iters = int(self.max_iters)
        if not self.grad_tol > 0:
            raise InvalidParameter(f"grad_tol must be positive, got {self.grad_tol}.")


@dataclass(frozen=True)
class TrajectoryRecord:
    iteration: int
    theta: np.ndarray
    cost: float
    grad_norm: float
    step: np.ndarray
    predicted_decrease: float

    @property
    def step_norm(self):
        return float(np.linalg.norm(self.step))


@dataclass
class Trajectory:
    """
    Per-iteration records of one run.

    The last record is the terminal iterate with a zero step, so a run capped
    at max_iters carries max_iters + 1 records.
    """
    label: str
    records: List[TrajectoryRecord] = field(default_factory=list)
    status: str = STATUS_MAX_ITERS
    message: str = ""

    def __len__(self):
        return len(self.records)

    @property
    def costs(self):
        return np.array([r.cost for r in self.records])

    @property
    def final_theta(self):
        return self.records[-1].theta if self.records else None

    def cost_at(self, iteration):
        if not 0 <= iteration < len(self.records):
            raise InvalidParameter(f"Iteration {iteration} is outside the recorded range 0..{len(self.records) - 1}.")
        return self.records[iteration].cost


def _quantum_evaluator(family, target, cfg):
    if not isinstance(target, DensityOperator):
        target = DensityOperator.from_matrix(target)
    cost_target = mix_with_identity(target, cfg.delta) if cfg.mix_cost else target
    cost = CostFunction(cost_target)

    def evaluate(theta, with_metric=True):
        raw = family.value(theta)
        raw_partials = family.partials(theta)
        rho = mix_with_identity(raw, cfg.delta)
        partials = mix_partials(raw_partials, cfg.delta)
        G = quantum_fisher_metric(rho.spectral, partials, cfg.petz) if with_metric else None
        if cfg.mix_cost:
            return cost.value(rho), cost.gradient(rho, partials), G
        return cost.value(raw), cost.gradient(raw, raw_partials), G

    return evaluate


def _classical_evaluator(family, target, cfg):
    target = np.asarray(target, dtype=float)
    cost = DistributionCost(mix_distribution(target, cfg.delta) if cfg.mix_cost else target)

    def evaluate(theta, with_metric=True):
        raw = family.value(theta)
        raw_partials = family.partials(theta)
        p = mix_distribution(raw, cfg.delta)
        partials = (1.0 - cfg.delta) * raw_partials
        G = classical_fisher_metric(p, partials) if with_metric else None
        if cfg.mix_cost:
            return cost.value(p), cost.gradient(p, partials), G
        return cost.value(raw), cost.gradient(raw, raw_partials), G

    return evaluate


def run_optimization(family, target, cfg, theta0):
    """
    Runs the natural-gradient iteration from theta0 toward target.

    A vanishing gradient ends the run with status "converged". Any other
    library error raised while evaluating or stepping (singular metric,
    singular state, degenerate distribution) ends it with status "error"
    and keeps the records gathered so far.
    """
    theta = family.check_theta(theta0).copy()
    evaluate = _quantum_evaluator(family, target, cfg) if family.is_quantum else _classical_evaluator(family, target, cfg)
    trajectory = Trajectory(label=cfg.petz.label)
    zero = np.zeros_like(theta)

    for iteration in range(cfg.max_iters + 1):
        terminal = iteration == cfg.max_iters
        try:
            cost, grad, G = evaluate(theta, with_metric=not terminal)
            grad_norm = float(np.linalg.norm(grad))
            if terminal:
                trajectory.records.append(TrajectoryRecord(iteration, theta, cost, grad_norm, zero, 0.0))
                trajectory.status = STATUS_MAX_ITERS
                break

            if cfg.diagonal:
                G = diagonal_metric(G)
            G = regularize_metric(G, cfg.xi)
            step, predicted = natural_gradient_step(
                cfg.mode, G, grad, epsilon=cfg.epsilon, eta=cfg.eta, grad_tol=cfg.grad_tol
            )
        except VanishingGradient:
            trajectory.records.append(TrajectoryRecord(iteration, theta, cost, grad_norm, zero, 0.0))
            trajectory.status = STATUS_CONVERGED
            break
        except QngError as e:
            trajectory.status = STATUS_ERROR
            trajectory.message = f"iteration {iteration}: {e}"
            break

        trajectory.records.append(TrajectoryRecord(iteration, theta, cost, grad_norm, step, predicted))
        theta = theta + step

    return trajectory
