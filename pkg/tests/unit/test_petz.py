import numpy as np
import pytest
from numpy.testing import assert_allclose

from qnglab_cli.errors import InvalidParameter
from qnglab_cli.petz import (
    PetzFunction,
    PetzKind,
    classify_alpha,
    is_in_monotone_window,
    log_grid,
    order_violation,
    petz_beta,
    petz_eval,
    petz_pointwise_leq,
)

T = np.array([0.01, 0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 10.0, 100.0])


@pytest.mark.parametrize("alpha", [-100.0, -1.0, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 1.0, 2.0, 100.0])
def test_normalization_and_symmetry(alpha):
    f = PetzFunction.from_alpha(alpha)
    assert petz_eval(f, 1.0) == 1.0
    assert_allclose(petz_eval(f, T), T * petz_eval(f, 1.0 / T), rtol=1e-10)


@pytest.mark.parametrize("f", [PetzFunction.sld(), PetzFunction.rrld(),
                               PetzFunction.kubo_mori(), PetzFunction.large_alpha()])
def test_presets_are_normalized_and_symmetric(f):
    assert petz_eval(f, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert_allclose(petz_eval(f, T), T * petz_eval(f, 1.0 / T), rtol=1e-10)


def test_known_values():
    assert petz_eval(PetzFunction.sld(), 2.0) == pytest.approx(1.5)
    assert petz_eval(PetzFunction.rrld(), 2.0) == pytest.approx(4.0 / 3.0)
    assert petz_eval(PetzFunction.from_alpha(0.1), 2.0) == pytest.approx(0.9 * 1023.0 / 511.0, rel=1e-12)
    assert petz_eval(PetzFunction.large_alpha(), 2.0) == pytest.approx(2.0 * np.log(2.0), rel=1e-12)
    assert petz_eval(PetzFunction.kubo_mori(), 2.0) == pytest.approx(1.0 / np.log(2.0), rel=1e-12)


def test_half_and_minus_one_reproduce_sld_and_rrld():
    assert_allclose(petz_eval(PetzFunction.from_alpha(0.5), T), petz_eval(PetzFunction.sld(), T), rtol=1e-12)
    assert_allclose(petz_eval(PetzFunction.from_alpha(-1.0), T), petz_eval(PetzFunction.rrld(), T), rtol=1e-12)


def test_alpha_one_is_kubo_mori():
    assert_allclose(petz_eval(PetzFunction.from_alpha(1.0), T), petz_eval(PetzFunction.kubo_mori(), T), rtol=1e-12)


def test_huge_alpha_routes_to_large_alpha_limit():
    big = petz_eval(PetzFunction.from_alpha(1e7), T)
    assert_allclose(big, petz_eval(PetzFunction.large_alpha(), T), rtol=0, atol=0)
    near = petz_eval(PetzFunction.from_alpha(-1e5), T[T >= 0.1])
    assert_allclose(near, petz_eval(PetzFunction.large_alpha(), T[T >= 0.1]), rtol=1e-4)


def test_continuous_across_t_equals_one():
    f = PetzFunction.from_alpha(0.3)
    around = np.array([1.0 - 1e-9, 1.0 - 1e-7, 1.0, 1.0 + 1e-7, 1.0 + 1e-9])
    assert_allclose(petz_eval(f, around), 1.0 + 0.5 * (around - 1.0), atol=1e-8)
    assert np.all(np.isfinite(petz_eval(PetzFunction.kubo_mori(), around)))


def test_extreme_t_stays_finite():
    values = petz_eval(PetzFunction.from_alpha(0.1), np.array([1e-12, 1e12]))
    assert np.all(np.isfinite(values))
    assert np.all(values > 0)


def test_scalar_in_scalar_out():
    assert isinstance(petz_eval(PetzFunction.sld(), 3.0), float)
    assert petz_eval(PetzFunction.sld(), np.array([3.0])).shape == (1,)


def test_invalid_inputs():
    with pytest.raises(InvalidParameter):
        PetzFunction.from_alpha(0.0)
    with pytest.raises(InvalidParameter):
        PetzFunction.from_alpha(float('nan'))
    with pytest.raises(InvalidParameter):
        petz_eval(PetzFunction.sld(), 0.0)
    with pytest.raises(InvalidParameter):
        petz_eval(PetzFunction.sld(), np.array([1.0, -2.0]))
    with pytest.raises(InvalidParameter):
        PetzFunction(PetzKind.SLD, 0.5)


def test_parse_accepts_numbers_and_presets():
    assert PetzFunction.parse("sld") == PetzFunction.sld()
    assert PetzFunction.parse(" RRLD ") == PetzFunction.rrld()
    assert PetzFunction.parse("0.3") == PetzFunction.from_alpha(0.3)
    assert PetzFunction.parse(-1) == PetzFunction.from_alpha(-1.0)
    f = PetzFunction.kubo_mori()
    assert PetzFunction.parse(f) is f
    with pytest.raises(InvalidParameter):
        PetzFunction.parse("quantum")


def test_labels():
    assert PetzFunction.from_alpha(0.1).label == "0.1"
    assert PetzFunction.from_alpha(-100).label == "-100.0"
    assert PetzFunction.large_alpha().label == "large_alpha"


@pytest.mark.parametrize("alpha,expected", [
    (-100.0, True), (-1.0, True), (-0.99, False), (-0.3, False),
    (0.1, False), (0.49, False), (0.5, True), (2.0, True),
])
def test_monotone_window(alpha, expected):
    assert is_in_monotone_window(alpha) is expected
    assert classify_alpha(alpha) == ("monotone" if expected else "non-monotone")


def test_monotone_window_rejects_zero():
    with pytest.raises(InvalidParameter):
        is_in_monotone_window(0.0)


def test_presets_are_monotone():
    for name in ("sld", "rrld", "kubo_mori", "large_alpha"):
        assert classify_alpha(name) == "monotone"


@pytest.mark.parametrize("alpha", [-100.0, -2.0, -1.0, 0.5, 0.7, 2.0, 100.0])
def test_monotone_functions_lie_between_rrld_and_sld(alpha):
    f = PetzFunction.from_alpha(alpha)
    assert petz_pointwise_leq(PetzFunction.rrld(), f)
    assert petz_pointwise_leq(f, PetzFunction.sld())


def test_non_monotone_alpha_exceeds_sld():
    assert not petz_pointwise_leq(PetzFunction.from_alpha(0.1), PetzFunction.sld())
    assert order_violation(PetzFunction.from_alpha(0.1), PetzFunction.sld(), [2.0]) > 0.3


def test_beta_chain_is_ordered():
    # beta = 1/alpha in {2, ..., 10}: larger beta gives a larger function
    grid = log_grid()
    betas = [2.0, 2.5, 10.0 / 3.0, 5.0, 10.0]
    values = [petz_beta(b, grid) for b in betas]
    for lower, upper in zip(values, values[1:]):
        assert np.all(lower <= upper * (1 + 1e-12))


def test_petz_beta_zero_is_large_alpha():
    assert_allclose(petz_beta(0, T), petz_eval(PetzFunction.large_alpha(), T))


def test_log_grid_validation():
    assert log_grid(3, 0.1, 10.0).tolist() == pytest.approx([0.1, 1.0, 10.0])
    with pytest.raises(InvalidParameter):
        log_grid(0)
    with pytest.raises(InvalidParameter):
        order_violation(PetzFunction.sld(), PetzFunction.rrld(), [])
