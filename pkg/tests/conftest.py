import math
from pathlib import Path

import pytest

from hdqkd.config import (
    ConfigBundle,
    IntensityProfile,
    ProtocolParams,
    SecurityBudget,
    SessionSpec,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
REFERENCE_CONFIG = REPO_ROOT / "configs" / "reference.toml"

# Benchmark physical constants (times in ps, rates in Hz, loss in dB/km).
BENCHMARK = dict(
    eta_d=0.9, Y0=1000.0, sigma_jit=18.0, alpha=0.21, beta_D=2e4,
    R_rep=55.6e6, sigma_cor=2.0, sigma_coh=6000.0, T_f=6000.0,
    delta=20.0, beta_e=0.91, q=0.9, d0=2.0, p_alpha=0.0,
)


@pytest.fixture
def table1_params() -> ProtocolParams:
    return ProtocolParams(**BENCHMARK)


@pytest.fixture
def example_profile() -> IntensityProfile:
    # the three-intensity example set used by the decoy formula checks
    return IntensityProfile(mu=(0.5, 0.1, 0.01), p_mu=(0.8, 0.1, 0.1))


@pytest.fixture
def budget() -> SecurityBudget:
    return SecurityBudget.from_total(1e-10)


@pytest.fixture
def reference_text() -> str:
    return REFERENCE_CONFIG.read_text()


def make_bundle(params: ProtocolParams, profile: IntensityProfile,
                budget: SecurityBudget, distance_km: float,
                running_time_s: float) -> ConfigBundle:
    session = SessionSpec(
        distance_km=distance_km,
        running_time_s=running_time_s,
        block_size=params.R_rep * running_time_s,
    )
    return ConfigBundle(params, profile, budget, session)


def rel_err(value: float, expected: float) -> float:
    return abs(value - expected) / abs(expected)


def assert_close(value: float, expected: float, rtol: float, what: str = ""):
    err = rel_err(value, expected)
    assert err <= rtol, (
        f"{what or 'value'} = {value!r}, expected {expected!r} "
        f"(rel err {err:.3e} > {rtol:g})"
    )
