"""End-to-end evaluation: configuration -> observation -> bounds -> key rate."""

from __future__ import annotations

from dataclasses import dataclass

from .channel import ChannelObservation, frame_statistics, sample_frame_statistics
from .config import ConfigBundle
from .decoy import DecoyBounds, estimate_bounds
from .overlap import VacuousOverlapError, overlap_discrete
from .security import (
    ABORT_NONPOSITIVE,
    KeyRateReport,
    d_min,
    finalize_report,
    key_length,
)

__all__ = ["PipelineResult", "evaluate"]


@dataclass(frozen=True)
class PipelineResult:
    report: KeyRateReport
    observation: ChannelObservation
    bounds: DecoyBounds
    c_discrete: float


def evaluate(bundle: ConfigBundle, seed: int | None = None) -> PipelineResult:
    """Run one session end to end.

    Deterministic (expected-value observations) unless ``seed`` is given,
    in which case the seeded Poisson-sampling channel variant is used.
    A vacuous uncertainty bound (overlap >= 1) yields a nonpositive-key
    abort rather than an exception, so parameter sweeps can cross it.
    """
    params, profile, budget, session = bundle
    if seed is None:
        obs = frame_statistics(params, profile, session)
    else:
        obs, _ = sample_frame_statistics(params, profile, session, seed)
    bounds = estimate_bounds(obs, profile, budget, params.delta)

    try:
        c = overlap_discrete(params.delta, params.beta_D)
    except VacuousOverlapError:
        report = KeyRateReport(
            ell_bits=0.0, rate_bps=0.0, pie=0.0,
            uncertainty_term=0.0, gamma_term=0.0, leak_ec_bits=0.0,
            eps_term=0.0, delta_fluct=0.0, d_min=d_min(params),
            abort_reason=ABORT_NONPOSITIVE,
        )
        return PipelineResult(report, obs, bounds, float("nan"))

    report = key_length(c, bounds, obs.n_T_mu[0], params, budget)
    report = finalize_report(report, obs.n_T_mu[0], session)
    return PipelineResult(report, obs, bounds, c)
