import numpy as np
import pytest
from numpy.testing import assert_allclose

from qnglab_cli.classical import (
    DistributionCost,
    SoftmaxFamily,
    classical_ng_step,
    mix_distribution,
    softmax_family,
)
from qnglab_cli.errors import InvalidParameter
from qnglab_cli.steps import UpdateMode


def test_softmax_at_origin():
    p, partials = softmax_family(np.zeros(2))
    assert_allclose(p, [0.5, 0.5])
    assert_allclose(partials, [[0.25, -0.25], [-0.25, 0.25]])


def test_softmax_partials_match_differences():
    family = SoftmaxFamily(4)
    theta = np.array([0.3, -1.2, 0.5, 2.0])
    h = 1e-6
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        numeric = (family.value(theta + e) - family.value(theta - e)) / (2 * h)
        assert_allclose(family.partials(theta)[k], numeric, atol=1e-9)
    assert_allclose(family.partials(theta).sum(axis=1), 0.0, atol=1e-15)


def test_softmax_validation():
    with pytest.raises(InvalidParameter):
        SoftmaxFamily(1)
    with pytest.raises(InvalidParameter):
        SoftmaxFamily(3).value([0.0, 1.0])
    assert SoftmaxFamily(3).descriptor() == {"family": "softmax", "outcomes": 3}


def test_mix_distribution():
    assert_allclose(mix_distribution([1.0, 0.0], 0.5), [0.75, 0.25])
    with pytest.raises(InvalidParameter):
        mix_distribution([0.5, 0.5], -0.1)


def test_distribution_cost():
    cost = DistributionCost(np.array([0.5, 0.5]))
    p = np.array([0.75, 0.25])
    assert cost.value(p) == pytest.approx(0.125)
    partials = np.array([[0.1, -0.1]])
    assert_allclose(cost.gradient(p, partials), [2.0 * (0.1 * 0.25 - 0.1 * -0.25)])


def test_classical_step_ignores_alpha():
    family = SoftmaxFamily(3)
    theta = np.array([0.2, -0.4, 0.1])
    target = family.value(np.array([1.0, 0.0, -1.0]))
    grad = DistributionCost(target).gradient(family.value(theta), family.partials(theta))
    steps = [classical_ng_step(family, grad, theta, epsilon=1e-6, alpha=a, xi=1e-3) for a in (None, 0.5, 2.0, -3.0)]
    for step, pred in steps[1:]:
        assert_allclose(step, steps[0][0], rtol=0, atol=0)
        assert pred == steps[0][1]


def test_classical_fixed_step_direction():
    family = SoftmaxFamily(2)
    theta = np.zeros(2)
    grad = np.array([1.0, -1.0])
    step, pred = classical_ng_step(family, grad, theta, mode=UpdateMode.FIXED, eta=0.1, xi=0.5)
    # G = 0.5 * 0.25 [[1, -1], [-1, 1]] + 0.5 I has eigenvalue 0.75 along (1, -1)
    assert_allclose(step, -0.1 * grad / 0.75)
    assert pred == pytest.approx(-0.1 * 2.0 / 0.75)
