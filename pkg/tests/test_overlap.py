import cmath
import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar
from scipy.special import fresnel as scipy_fresnel

from hdqkd.overlap import (
    FULL_LINE_TAIL,
    VacuousOverlapError,
    cbar_infinity,
    compute_overlap,
    fresnel_tail,
    overlap_dilated,
    overlap_discrete,
    overshoot_argmax,
    overshoot_constant,
)

from conftest import assert_close


def oracle_tail(v: float) -> complex:
    """Independent F(v) = int_v^inf e^{-i u^2} du via scipy's Fresnel integrals."""
    s, c = scipy_fresnel(math.sqrt(2.0 / math.pi) * v)
    half = math.sqrt(math.pi / 8.0)
    scale = math.sqrt(math.pi / 2.0)
    return complex(half - scale * c, -(half - scale * s))


def test_tail_at_zero():
    # half of the full-line integral by even symmetry: (sqrt(pi)/2) e^{-i pi/4}
    expected = (math.sqrt(math.pi) / 2.0) * cmath.exp(-1j * math.pi / 4.0)
    got = fresnel_tail(0.0, 1e-10)
    assert abs(got - expected) < 1e-9


def test_tail_full_line_limit():
    # as x -> -inf the tail approaches sqrt(pi) e^{-i pi/4}
    expected = math.sqrt(math.pi) * cmath.exp(-1j * math.pi / 4.0)
    assert abs(FULL_LINE_TAIL - expected) < 1e-15
    got = fresnel_tail(-1e6, 1e-8)
    assert abs(got - expected) < 1e-6


def test_tail_decay_for_positive_x():
    assert abs(fresnel_tail(50.0, 1e-9)) < 0.02
    mods = [abs(fresnel_tail(x, 1e-9)) for x in (50.0, 200.0, 1000.0)]
    assert mods[0] > mods[1] > mods[2]


@pytest.mark.parametrize("x", np.linspace(-8.0, 8.0, 33))
def test_tail_matches_scipy_oracle(x):
    got = fresnel_tail(float(x), 1e-11)
    assert abs(got - oracle_tail(float(x))) < 1e-9


def test_reflection_identity():
    rng = np.random.default_rng(7)
    for x in rng.uniform(-5.0, 5.0, size=20):
        lhs = fresnel_tail(float(x), 1e-9) + fresnel_tail(float(-x), 1e-9)
        assert abs(lhs - FULL_LINE_TAIL) < 1e-6


def test_tail_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        fresnel_tail(0.0, 0.0)


def test_overshoot_constant_value():
    # independent oracle: scipy fresnel + scipy golden optimizer
    res = minimize_scalar(lambda v: -abs(oracle_tail(v)) ** 2,
                          bracket=(-2.0, -1.5, -1.0), method="golden",
                          options={"xtol": 1e-12})
    oracle = abs(oracle_tail(res.x)) ** 2 / math.pi
    got = overshoot_constant(1e-6)
    assert_close(got, oracle, 1e-6, "overshoot constant")
    assert abs(got - 1.37) < 0.005


def test_overshoot_refinement_consistency():
    coarse = overshoot_constant(1e-2)
    fine = overshoot_constant(1e-4)
    assert abs(fine - coarse) <= coarse * 1e-2


def test_overshoot_argmax_negative():
    v_star = overshoot_argmax(1e-6)
    assert v_star < 0
    # the maximized squared modulus exceeds the full-line value pi
    assert abs(fresnel_tail(v_star, 1e-10)) ** 2 > math.pi


def test_overshoot_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        overshoot_constant(1.0)
    with pytest.raises(ValueError):
        overshoot_constant(1e-12)


def oracle_kernel_sup(beta: float) -> float:
    """sup_tau |int_Omega domega/2pi e^{i omega tau - i beta omega^2/4}|^2,
    normalized as the engine's cbar: kernel sup / (2 pi).

    Independent route: complete the square analytically, evaluate the
    remaining Fresnel tail with scipy, maximize with scipy's optimizer.
    """
    def neg(v):
        return -abs(oracle_tail(v)) ** 2
    res = minimize_scalar(neg, bracket=(-2.0, -1.5, -1.0), method="golden",
                          options={"xtol": 1e-12})
    peak = abs(oracle_tail(res.x)) ** 2
    return peak / (math.pi ** 2 * beta) / (2.0 * math.pi)


def test_cbar_value_and_oracle():
    # ~1.37 / (2 pi^2 beta_D)
    got = cbar_infinity(2e4)
    assert_close(got, 1.37 / (2.0 * math.pi**2 * 2e4), 0.01)
    assert_close(got, oracle_kernel_sup(2e4), 1e-6)


def test_cbar_shift_invariance():
    a = cbar_infinity(2e4, omega_min_detuning=0.0)
    b = cbar_infinity(2e4, omega_min_detuning=10.0)
    assert_close(a, b, 1e-4)
    with pytest.raises(ValueError):
        cbar_infinity(2e4, omega_min_detuning=math.inf)


def test_cbar_scaling_law():
    base = cbar_infinity(2e4)
    for k in (2.0, 10.0, 100.0, 1e3):
        assert_close(cbar_infinity(k * 2e4), base / k, 1e-6)
    # the quoted pair: beta 2e6 is the 2e4 value divided by exactly 100
    assert_close(cbar_infinity(2e6), base / 100.0, 1e-9)


def test_overlap_discrete_values():
    c = overlap_discrete(20.0, 2e4)
    assert_close(c, 1.37 * 400.0 / (2.0 * math.pi**2 * 2e4), 0.01)
    assert_close(overlap_discrete(20.0, 2e6), c / 100.0, 1e-9)


def test_overlap_discrete_vacuous():
    with pytest.raises(VacuousOverlapError):
        overlap_discrete(2000.0, 2e4)


def test_overlap_dilated_closed_form():
    assert_close(overlap_dilated(20.0, 2e4),
                 400.0 / (2.0 * math.pi**2 * 2e4), 1e-12)
    assert_close(overlap_dilated(20.0, 2e6), 1.01321e-5, 1e-4)
    with pytest.raises(ValueError):
        overlap_dilated(0.0, 2e4)


def test_dilated_below_discrete():
    for delta, beta in [(20.0, 2e4), (20.0, 2e6), (7.0, 1e3), (100.0, 1e6)]:
        assert overlap_dilated(delta, beta) < cbar_infinity(beta) * delta**2


def test_ratio_equals_overshoot():
    for delta, beta in [(20.0, 2e4), (50.0, 1e6), (5.0, 300.0)]:
        ratio = (cbar_infinity(beta) * delta**2) / overlap_dilated(delta, beta)
        assert_close(ratio, overshoot_constant(), 1e-9)


def test_compute_overlap_bundle():
    res = compute_overlap(20.0, 2e4)
    assert not res.vacuous
    assert_close(res.c_discrete, res.c_bar_inf * 400.0, 1e-12)
    assert_close(res.overshoot, res.c_discrete / res.c_dilated, 1e-9)
    assert res.argmax_v < 0
    vac = compute_overlap(2000.0, 2e4)
    assert vac.vacuous and vac.c_discrete > 1.0
