"""Finite-key secret-key length and its ingredient terms.

The extractable key length combines four terms:

    ell = n01_lower * (-log2 c)                uncertainty credit
        - n_mu1 * log2 gamma(d0 + Delta)       information-reconciliation cost
        - leak_EC                              error-correction leakage
        + log2(eps_s^2 eps_c)                  composition penalty

clamped below at zero and above at the raw alphabet entropy
n_mu1 * log2(T_f/delta) (the binned overlap can make -log2 c exceed the
raw entropy, and no extractor can beat the alphabet).  The protocol
aborts before any of this if the configured threshold d0 does not exceed
the no-eavesdropper minimum distance, or if the certified conjugate-time
distance exceeds d0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import mutual_information_bits
from .config import ProtocolParams, SecurityBudget, SessionSpec
from .decoy import DecoyBounds

__all__ = [
    "InfeasiblePAlphaError",
    "KeyRateReport",
    "d_min",
    "delta_fluctuation",
    "gamma",
    "key_length",
    "key_rate_report",
    "leak_ec",
]

ABORT_NONE = "none"
ABORT_DISTANCE = "distance-exceeded"
ABORT_THRESHOLD = "threshold-below-dmin"
ABORT_NONPOSITIVE = "nonpositive-key"


class InfeasiblePAlphaError(ValueError):
    """The statistical-fluctuation term is undefined for this p_alpha."""


def gamma(x: float) -> float:
    """Penalty factor (x + sqrt(1+x^2)) * (x / (sqrt(1+x^2) - 1))^x.

    gamma(0) = 1 (the x -> 0 limit of (2/x)^x).  Evaluated through the
    algebraically equivalent base (1 + sqrt(1+x^2))/x, which avoids the
    cancellation in sqrt(1+x^2) - 1 for small x.
    """
    if x < 0:
        raise ValueError("gamma is defined for x >= 0")
    if x == 0:
        return 1.0
    s = math.sqrt(1.0 + x * x)
    return (x + s) * math.exp(x * math.log((1.0 + s) / x))


def delta_fluctuation(params: ProtocolParams, n_T01_lower: float,
                      eps_s: float) -> float:
    """Statistical fluctuation Delta (in bins) of the distance estimate.

    Delta = (T_f/delta) * sqrt( ln(1/(eps_s/4 - 2 f)) / (q^2 (1-q)^2 n01) )
    with f = sqrt(2 (1 - (1-p_alpha)^n01)).  For any appreciable
    p_alpha the argument of the logarithm goes negative and the term is
    undefined; that surfaces as :class:`InfeasiblePAlphaError`.
    """
    if n_T01_lower <= 0:
        raise ValueError("n_T01_lower must be strictly positive")
    if not (0.0 < eps_s < 1.0):
        raise ValueError("eps_s must lie strictly inside (0, 1)")
    survive = math.exp(n_T01_lower * math.log1p(-params.p_alpha))
    f = math.sqrt(2.0 * (1.0 - survive))
    arg = eps_s / 4.0 - 2.0 * f
    if arg <= 0:
        raise InfeasiblePAlphaError(
            f"eps_s/4 - 2 f(p_alpha, n01) = {arg:.3g} <= 0 for "
            f"p_alpha = {params.p_alpha:g}, n01 = {n_T01_lower:.3g}: "
            "the fluctuation term is undefined"
        )
    q = params.q
    return (params.T_f / params.delta) * math.sqrt(
        math.log(1.0 / arg) / (q * q * (1.0 - q) ** 2 * n_T01_lower)
    )


def leak_ec(params: ProtocolParams, n_T_mu1: float, eps_hash: float) -> float:
    """Error-correction leakage in bits.

    Per-coincidence model: raw entropy minus the reconciled fraction,
    n * (log2(T_f/delta) - beta_e * I), plus the ceil(log2(1/eps_hash))
    bits published for key verification.  Never below the hash cost.

    The reconcilable information I follows ``params.ec_model``: the
    Gaussian timing channel by default, or the full alphabet entropy for
    the idealized "alphabet" model (leakage then reduces to the
    (1 - beta_e) inefficiency on the raw bits).
    """
    if n_T_mu1 < 0:
        raise ValueError("n_T_mu1 must be non-negative")
    hash_bits = math.ceil(math.log2(1.0 / eps_hash))
    if params.ec_model == "alphabet":
        info = params.raw_bits_per_frame
    else:
        info = mutual_information_bits(params)
    leak = n_T_mu1 * (params.raw_bits_per_frame - params.beta_e * info)
    return max(float(hash_bits), leak + hash_bits)


def d_min(params: ProtocolParams) -> float:
    """No-eavesdropper minimum L1 distance (bins) for conjugate-time outcomes.

    d_min = sqrt((16 sigma_coh^2 sigma_cor^2 + beta_D^2)
                 / (8 pi sigma_coh^2 delta^2)); the threshold d0 must
    exceed this for a positive key rate to be possible at all.
    """
    num = 16.0 * params.sigma_coh**2 * params.sigma_cor**2 + params.beta_D**2
    den = 8.0 * math.pi * params.sigma_coh**2 * params.delta**2
    return math.sqrt(num / den)


@dataclass(frozen=True)
class KeyRateReport:
    """Secret-key length, rate, and the individual bound terms."""

    ell_bits: float
    rate_bps: float
    pie: float
    uncertainty_term: float
    gamma_term: float
    leak_ec_bits: float
    eps_term: float
    delta_fluct: float
    d_min: float
    abort_reason: str


def _abort(reason: str, dmin: float) -> KeyRateReport:
    return KeyRateReport(
        ell_bits=0.0, rate_bps=0.0, pie=0.0,
        uncertainty_term=0.0, gamma_term=0.0, leak_ec_bits=0.0, eps_term=0.0,
        delta_fluct=0.0, d_min=dmin, abort_reason=reason,
    )


def key_length(c: float, bounds: DecoyBounds, n_T_mu1: float,
               params: ProtocolParams, budget: SecurityBudget,
               leak_bits: float | None = None,
               delta_fluct: float | None = None) -> KeyRateReport:
    """Assemble the secret-key length for one session.

    ``leak_bits`` and ``delta_fluct`` default to the engine's own models
    and can be overridden with externally measured values (leakage is
    observable during reconciliation).  Rate and PIE are filled in by
    :func:`key_rate_report`.
    """
    if not (0.0 < c < 1.0):
        raise ValueError("overlap c must lie strictly inside (0, 1)")
    dmin = d_min(params)
    if params.d0 <= dmin:
        return _abort(ABORT_THRESHOLD, dmin)
    if bounds.d_W1_upper > params.d0:
        return _abort(ABORT_DISTANCE, dmin)
    n01 = bounds.n_T01_lower
    if n01 <= 0 or n_T_mu1 <= 0:
        return _abort(ABORT_NONPOSITIVE, dmin)

    if delta_fluct is None:
        delta_fluct = delta_fluctuation(params, n01, budget.eps_s)
    if leak_bits is None:
        leak_bits = leak_ec(params, n_T_mu1, budget.eps_hash)

    uncertainty = n01 * (-math.log2(c))
    gamma_term = n_T_mu1 * math.log2(gamma(params.d0 + delta_fluct))
    eps_term = math.log2(budget.eps_s**2 * budget.eps_c)
    ell_raw = uncertainty - gamma_term - leak_bits + eps_term
    entropy_cap = n_T_mu1 * params.raw_bits_per_frame

    if ell_raw <= 0:
        ell, reason = 0.0, ABORT_NONPOSITIVE
    else:
        ell, reason = min(ell_raw, entropy_cap), ABORT_NONE
    return KeyRateReport(
        ell_bits=ell, rate_bps=0.0, pie=0.0,
        uncertainty_term=uncertainty, gamma_term=gamma_term,
        leak_ec_bits=leak_bits, eps_term=eps_term,
        delta_fluct=delta_fluct, d_min=dmin, abort_reason=reason,
    )


def key_rate_report(ell_bits: float, n_T_mu1: float,
                    session: SessionSpec) -> tuple[float, float]:
    """Secret-key rate (bits/s) and photon information efficiency.

    PIE is secret bits per signal-intensity T-basis coincidence; zero
    when there were no such coincidences.
    """
    if session.running_time_s <= 0:
        raise ValueError("running_time_s must be strictly positive")
    rate = ell_bits / session.running_time_s
    pie = ell_bits / n_T_mu1 if n_T_mu1 > 0 else 0.0
    return rate, pie


def finalize_report(report: KeyRateReport, n_T_mu1: float,
                    session: SessionSpec) -> KeyRateReport:
    """Return a copy of ``report`` with rate and PIE filled in."""
    rate, pie = key_rate_report(report.ell_bits, n_T_mu1, session)
    return replace(report, rate_bps=rate, pie=pie)
