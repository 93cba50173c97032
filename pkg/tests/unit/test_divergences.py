import numpy as np
import pytest
from numpy.testing import assert_allclose

from qnglab_cli.classical import SoftmaxFamily
from qnglab_cli.divergences import (
    DivergenceFamily,
    DivergenceSpec,
    classical_kl,
    classical_renyi,
    fd_metric_from_divergence,
    quantum_kl,
    quantum_sandwiched_renyi,
)
from qnglab_cli.errors import InvalidParameter, SingularState
from qnglab_cli.metrics import classical_fisher_metric, quantum_fisher_metric
from qnglab_cli.petz import PetzFunction
from qnglab_cli.states import mix_partials, mix_with_identity

P = (0.6, 0.4)
Q = (0.5, 0.5)


def test_classical_values():
    assert classical_renyi(P, Q, 2.0) == pytest.approx(0.5 * np.log(1.04), rel=1e-12)
    assert classical_kl(P, Q) == pytest.approx(0.6 * np.log(1.2) + 0.4 * np.log(0.8), rel=1e-12)
    assert classical_kl(P, Q) == pytest.approx(0.0201363, abs=1e-7)


def test_renyi_approaches_kl_near_one():
    kl = classical_kl(P, Q)
    for alpha in (1.0 - 1e-6, 1.0 + 1e-6):
        assert abs(classical_renyi(P, Q, alpha) - kl) <= 1e-4


@pytest.mark.parametrize("alpha", [0.0, 1.0, float('inf')])
def test_singular_orders_rejected(alpha):
    with pytest.raises(InvalidParameter):
        classical_renyi(P, Q, alpha)
    with pytest.raises(InvalidParameter):
        DivergenceSpec(DivergenceFamily.QUANTUM_SANDWICHED_RENYI, alpha)


def test_length_mismatch():
    with pytest.raises(InvalidParameter):
        classical_kl(P, (0.2, 0.3, 0.5))


def test_quantum_kl_values():
    assert quantum_kl(np.diag([0.6, 0.4]), np.eye(2) / 2) == pytest.approx(0.0201363, abs=1e-7)
    assert quantum_kl(np.eye(2) / 2, np.diag([0.75, 0.25])) == pytest.approx(0.1438410, abs=1e-7)


@pytest.mark.parametrize("alpha", [-0.5, 0.3, 0.5, 2.0])
def test_commuting_sandwiched_equals_classical(alpha):
    value = quantum_sandwiched_renyi(np.diag(P), np.diag(Q), alpha)
    assert value == pytest.approx(classical_renyi(P, Q, alpha), rel=1e-10)


def test_equal_arguments_vanish(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    M = A @ A.conj().T + 0.1 * np.eye(3)
    rho = M / np.trace(M).real
    for alpha in (-0.5, 0.3, 0.5, 2.0):
        assert abs(quantum_sandwiched_renyi(rho, rho, alpha)) <= 1e-12
    assert abs(quantum_kl(rho, rho)) <= 1e-12


def test_sandwiched_nonnegative_in_data_processing_range(rng):
    rho_bar = np.array([[0.7, 0.2], [0.2, 0.3]])
    rho = np.diag([0.4, 0.6])
    for alpha in (0.5, 2.0):
        assert quantum_sandwiched_renyi(rho_bar, rho, alpha) > 0


def test_rank_deficient_state_rejected():
    with pytest.raises(SingularState):
        quantum_sandwiched_renyi(np.diag([1.0, 0.0]), np.eye(2) / 2, 2.0)


def test_divergence_dispatch():
    spec = DivergenceSpec(DivergenceFamily.CLASSICAL_RENYI, 2.0)
    assert not spec.is_quantum
    assert spec.evaluate(P, Q) == pytest.approx(classical_renyi(P, Q, 2.0))
    kl = DivergenceSpec(DivergenceFamily.QUANTUM_KL)
    assert kl.is_quantum
    assert kl.evaluate(np.diag(P), np.diag(Q)) == pytest.approx(classical_kl(P, Q))


@pytest.mark.parametrize("alpha", [-1.0, 0.3, 2.0])
def test_sandwiched_hessian_matches_petz_metric(rotation, alpha):
    # the Hessian of D_alpha is the metric of f_alpha on the same stencil states
    theta = np.array([0.3, 1.1, -0.4])
    delta = 1e-2
    spec = DivergenceSpec(DivergenceFamily.QUANTUM_SANDWICHED_RENYI, alpha)
    G_fd = fd_metric_from_divergence(spec, rotation, theta, h=1e-3, delta=delta)
    rho = mix_with_identity(rotation.value(theta), delta)
    G = quantum_fisher_metric(rho, mix_partials(rotation.partials(theta), delta), PetzFunction.from_alpha(alpha))
    assert_allclose(G_fd, G, atol=1e-3 * max(1.0, np.abs(G).max()))


def test_classical_hessian_ignores_alpha():
    family = SoftmaxFamily(3)
    theta = np.array([0.2, -0.1, 0.4])
    p = family.value(theta)
    G = classical_fisher_metric(p, family.partials(theta))
    for alpha in (-0.5, 0.3, 2.0):
        spec = DivergenceSpec(DivergenceFamily.CLASSICAL_RENYI, alpha)
        assert_allclose(fd_metric_from_divergence(spec, family, theta), G, atol=1e-4)


def test_fd_step_must_be_positive(rotation):
    spec = DivergenceSpec(DivergenceFamily.QUANTUM_KL)
    with pytest.raises(InvalidParameter):
        fd_metric_from_divergence(spec, rotation, [0.0, 0.0, 0.0], h=0.0)
