import math

import mpmath as mp
import pytest

from hdqkd.config import ProtocolParams, SecurityBudget, SessionSpec
from hdqkd.decoy import DecoyBounds
from hdqkd.security import (
    ABORT_DISTANCE,
    ABORT_NONE,
    ABORT_NONPOSITIVE,
    ABORT_THRESHOLD,
    InfeasiblePAlphaError,
    d_min,
    delta_fluctuation,
    gamma,
    key_length,
    key_rate_report,
    leak_ec,
)

from conftest import BENCHMARK, assert_close


def gamma_oracle(x: float) -> float:
    """50-digit evaluation of the penalty factor."""
    mp.mp.dps = 50
    xm = mp.mpf(repr(x))
    if xm == 0:
        return 1.0
    s = mp.sqrt(1 + xm * xm)
    return float((xm + s) * (xm / (s - 1)) ** xm)


def make_bounds(n01: float, d_w1: float = 0.5) -> DecoyBounds:
    z = (0.0, 0.0, 0.0)
    return DecoyBounds(
        n_T_upper=z, n_T_lower=z, n_W_upper=z, n_W_lower=z,
        s_T0_lower=0.0, s_T1_lower=n01, n_T0_lower=0.0, n_T1_lower=n01,
        n_T01_lower=n01, s_W1_lower=1.0, sigma2_W1_upper=100.0,
        d_W1_upper=d_w1,
    )


@pytest.fixture
def params():
    return ProtocolParams(**BENCHMARK)


@pytest.fixture
def budget():
    return SecurityBudget.from_total(1e-10)


def test_gamma_values():
    assert gamma(0.0) == 1.0
    assert_close(gamma(1.0), (1.0 + math.sqrt(2.0)) ** 2, 1e-12)
    assert_close(gamma(1.0), 5.82843, 1e-5)
    assert_close(gamma(2.0), 11.0902, 1e-5)


@pytest.mark.parametrize("x", [0.0, 1e-12, 1e-6, 0.5, 1.0, 2.0, 5.7346, 20.0, 100.0])
def test_gamma_matches_high_precision(x):
    assert_close(gamma(x), gamma_oracle(x), 1e-9)


def test_gamma_monotone_and_above_one():
    xs = [i * 0.05 for i in range(401)]
    vals = [gamma(x) for x in xs]
    assert vals[0] == 1.0
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(v >= 1.0 for v in vals)
    with pytest.raises(ValueError):
        gamma(-0.1)


def test_delta_fluctuation_worked_example(params, budget):
    # p_alpha = 0, T_f/delta = 300, q = 0.9, eps_s = 5e-11, n01 = 2e7
    got = delta_fluctuation(params, 2e7, 5e-11)
    assert_close(got, 3.7346, 1e-4)


def test_delta_fluctuation_asymptotics(params):
    small = delta_fluctuation(params, 1e18, 5e-11)
    assert small < 1e-3
    with pytest.raises(ValueError):
        delta_fluctuation(params, 0.0, 5e-11)


def test_delta_fluctuation_infeasible_p_alpha():
    p = ProtocolParams(**{**BENCHMARK, "p_alpha": 1e-3})
    with pytest.raises(InfeasiblePAlphaError):
        delta_fluctuation(p, 1e6, 1e-10)


def test_leak_ec_values(params):
    # zero coincidences: only the hash-verification bits remain
    assert leak_ec(params, 0.0, 1e-10) == 34.0
    got = leak_ec(params, 1e6, 1e-10)
    assert_close(got, 2.9235e6 + 34.0, 1e-3)


def test_leak_ec_perfect_reconciliation():
    # beta_e = 1 with a channel carrying the full alphabet: hash bits only
    p = ProtocolParams(**{**BENCHMARK, "beta_e": 1.0, "sigma_cor": 1e-4,
                          "sigma_jit": 1e-3, "beta_D": 1e-6})
    assert leak_ec(p, 1e6, 1e-10) == 34.0


def test_leak_ec_alphabet_model():
    p = ProtocolParams(**{**BENCHMARK, "ec_model": "alphabet"})
    got = leak_ec(p, 1e6, 1e-10)
    expected = 1e6 * (1.0 - 0.91) * math.log2(300.0) + 34.0
    assert_close(got, expected, 1e-12)


def test_d_min_values(params):
    assert_close(d_min(params), 0.08644, 1.2e-3)
    strong = ProtocolParams(**{**BENCHMARK, "beta_D": 2e6})
    assert_close(d_min(strong), 3.326, 1e-3)
    assert d_min(strong) > strong.d0  # drives threshold aborts
    tiny = ProtocolParams(**{**BENCHMARK, "sigma_cor": 1e-6, "sigma_jit": 1e-5,
                             "beta_D": 1e-9})
    assert d_min(tiny) < 1e-6


def test_key_length_worked_example(params, budget):
    rep = key_length(
        c=1.3881e-3, bounds=make_bounds(1e6), n_T_mu1=1e6,
        params=params, budget=budget,
        leak_bits=3e6, delta_fluct=3.7346,
    )
    assert rep.abort_reason == ABORT_NONE
    assert_close(rep.uncertainty_term, 9.4926e6, 1e-4)
    assert_close(rep.gamma_term, 1e6 * math.log2(gamma_oracle(5.7346)), 1e-9)
    assert_close(rep.eps_term, math.log2((5e-11) ** 2 * 5e-11), 1e-12)
    assert_close(rep.ell_bits, 1.5267e6, 1e-3)
    # report identity
    recomposed = (rep.uncertainty_term - rep.gamma_term
                  - rep.leak_ec_bits + rep.eps_term)
    assert_close(rep.ell_bits, recomposed, 1e-12)


def test_key_length_aborts(params, budget):
    # leak exceeding the uncertainty credit: nonpositive key
    rep = key_length(1.3881e-3, make_bounds(1e6), 1e6, params, budget,
                     leak_bits=1e9, delta_fluct=3.7346)
    assert rep.abort_reason == ABORT_NONPOSITIVE and rep.ell_bits == 0.0
    # certified distance above threshold
    rep = key_length(1.3881e-3, make_bounds(1e6, d_w1=2.5), 1e6, params, budget)
    assert rep.abort_reason == ABORT_DISTANCE and rep.ell_bits == 0.0
    # threshold below the no-eavesdropper minimum
    strong = ProtocolParams(**{**BENCHMARK, "beta_D": 2e6})
    rep = key_length(1.3881e-5, make_bounds(1e6), 1e6, strong, budget)
    assert rep.abort_reason == ABORT_THRESHOLD and rep.ell_bits == 0.0
    # no certified vacuum+single frames
    rep = key_length(1.3881e-3, make_bounds(0.0), 1e6, params, budget)
    assert rep.abort_reason == ABORT_NONPOSITIVE
    with pytest.raises(ValueError):
        key_length(1.5, make_bounds(1e6), 1e6, params, budget)


def test_key_length_entropy_cap(params, budget):
    # an absurdly small overlap cannot push the key past the raw entropy
    rep = key_length(1e-30, make_bounds(1e6), 1e6, params, budget,
                     leak_bits=0.0, delta_fluct=0.0)
    cap = 1e6 * math.log2(300.0)
    assert rep.ell_bits == cap
    assert rep.abort_reason == ABORT_NONE


def test_key_length_monotone_in_threshold(params, budget):
    # ell never increases as d0 + Delta grows
    prev = math.inf
    for d0 in (0.5, 1.0, 2.0, 4.0, 8.0):
        p = ProtocolParams(**{**BENCHMARK, "d0": d0})
        rep = key_length(1.3881e-3, make_bounds(1e6), 1e6, p, budget,
                         leak_bits=3e6, delta_fluct=1.0)
        assert rep.ell_bits <= prev + 1e-9
        prev = rep.ell_bits


def test_key_length_beta_chain_property(params, budget):
    # scaling beta_D by K shifts the pre-cap key by exactly n01*log2(K)
    base = key_length(1.3881e-3, make_bounds(1e6), 1e6, params, budget,
                      leak_bits=3e6, delta_fluct=3.7346)
    for k in (2.0, 10.0, 100.0):
        scaled = key_length(1.3881e-3 / k, make_bounds(1e6), 1e6, params,
                            budget, leak_bits=3e6, delta_fluct=3.7346)
        gain = ((scaled.uncertainty_term - scaled.gamma_term
                 - scaled.leak_ec_bits + scaled.eps_term)
                - (base.uncertainty_term - base.gamma_term
                   - base.leak_ec_bits + base.eps_term))
        assert_close(gain, 1e6 * math.log2(k), 1e-9)


def test_key_rate_report_values():
    sess = SessionSpec(distance_km=0.0, running_time_s=60.0, block_size=1e9)
    rate, pie = key_rate_report(1.5267e6, 1e6, sess)
    assert_close(rate, 25445.0, 1e-4)
    assert_close(pie, 1.5267, 1e-9)
    rate, pie = key_rate_report(0.0, 1e6, sess)
    assert rate == 0.0 and pie == 0.0
    rate, pie = key_rate_report(3.3e6, 1e6, sess)
    assert_close(pie, 3.3, 1e-12)
    rate, pie = key_rate_report(10.0, 0.0, sess)
    assert pie == 0.0
