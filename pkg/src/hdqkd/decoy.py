"""Finite-key decoy-state estimation with three intensities.

Starting from the per-intensity coincidence counts, Hoeffding deviations
place the asymptotic counts inside [n - zeta, n + zeta] with zeta(n, eps)
= sqrt(n ln(1/eps) / 2), the deviation computed from the basis total and
shared by all intensities.  From the deviated counts the standard
three-intensity algebra yields a lower bound on the vacuum-frame number
(two-intensity difference), a lower bound on the single-pair frame
number (three-intensity bracket), and, on the conjugate-time side, an
upper bound on the single-pair mean-squared difference which converts to
an L1 code distance in bins via sqrt(2/pi * sigma^2) / delta.

All lower bounds clamp at zero and stay real-valued (they feed
real-valued rate formulas, not counters).  The quantity bounding the
single-pair mean-squared difference is used as an upper bound even
though the surrounding derivation is phrased as a rearranged lower-bound
inequality; the distance test needs the upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelObservation
from .config import IntensityProfile, SecurityBudget

__all__ = [
    "BasisBounds",
    "DecoyBounds",
    "DegenerateProfileError",
    "EstimationImpossibleError",
    "conditional_intensity",
    "estimate_bounds",
    "intensity_bounds",
    "l1_distance_upper",
    "sigma_single_upper",
    "single_bound",
    "tau",
    "vacuum_bound",
    "zeta",
]


class EstimationImpossibleError(RuntimeError):
    """The decoy data cannot certify the requested bound; abort the protocol."""


class DegenerateProfileError(ValueError):
    """The intensity profile makes a decoy denominator non-positive."""


def tau(n: int, profile: IntensityProfile) -> float:
    """Probability that a frame carries n pairs, averaged over intensities."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return sum(
        p_k * math.exp(-mu_k) * mu_k**n / math.factorial(n)
        for mu_k, p_k in zip(profile.mu, profile.p_mu)
    )


def conditional_intensity(k: int, n: int, profile: IntensityProfile) -> float:
    """P(intensity index k | n pairs emitted)."""
    tau_n = tau(n, profile)
    if tau_n <= 0:
        raise ZeroDivisionError(f"tau_{n} = 0: conditional probability undefined")
    mu_k, p_k = profile.mu[k], profile.p_mu[k]
    return p_k * math.exp(-mu_k) * mu_k**n / math.factorial(n) / tau_n


def zeta(n_T: float, eps: float) -> float:
    """Hoeffding deviation sqrt(n_T ln(1/eps) / 2) (natural log)."""
    if n_T < 0:
        raise ValueError("n_T must be non-negative")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie strictly inside (0, 1)")
    return math.sqrt(n_T * math.log(1.0 / eps) / 2.0)


@dataclass(frozen=True)
class BasisBounds:
    """Per-intensity upper/lower bounds on the asymptotic counts of one basis."""

    upper: tuple[float, float, float]
    lower: tuple[float, float, float]


def intensity_bounds(obs: ChannelObservation,
                     eps1: float) -> tuple[BasisBounds, BasisBounds]:
    """Deviated per-intensity counts for the T and W bases.

    The deviation uses the basis total, so it is the same for every
    intensity within a basis; lower bounds clamp at zero.
    """
    dev_t = zeta(obs.n_T_total, eps1)
    dev_w = zeta(obs.n_W_total, eps1)
    t = BasisBounds(
        upper=tuple(n + dev_t for n in obs.n_T_mu),
        lower=tuple(max(0.0, n - dev_t) for n in obs.n_T_mu),
    )
    w = BasisBounds(
        upper=tuple(n + dev_w for n in obs.n_W_mu),
        lower=tuple(max(0.0, n - dev_w) for n in obs.n_W_mu),
    )
    return t, w


def vacuum_bound(bounds: BasisBounds,
                 profile: IntensityProfile) -> tuple[float, float]:
    """Lower bounds (s0, n0) on vacuum frames and their mu1-attributed part."""
    m1, m2, m3 = profile.mu
    p1, p2, p3 = profile.p_mu
    if not m2 > m3:
        raise DegenerateProfileError("vacuum bound requires mu2 > mu3")
    s0 = (tau(0, profile) / (m2 - m3)) * (
        m2 * math.exp(m3) * bounds.lower[2] / p3
        - m3 * math.exp(m2) * bounds.upper[1] / p2
    )
    s0 = max(0.0, s0)
    return s0, s0 * conditional_intensity(0, 0, profile)


def single_bound(bounds: BasisBounds, profile: IntensityProfile,
                 s0_lower: float, eps2: float) -> tuple[float, float]:
    """Lower bounds (s1, n1) on single-pair frames and their mu1 part.

    The vacuum term enters the bracket as s0/tau0 with a positive
    coefficient, so substituting the vacuum *lower* bound decreases the
    bracket and is the conservative choice; this is asserted rather than
    assumed.
    """
    m1, m2, m3 = profile.mu
    p1, p2, p3 = profile.p_mu
    denom = m1 * (m2 - m3) - (m2 * m2 - m3 * m3)
    if denom <= 0:
        raise DegenerateProfileError(
            f"mu1(mu2-mu3) - (mu2^2-mu3^2) = {denom:.6g} <= 0 for "
            f"mu = {profile.mu}"
        )
    tau0 = tau(0, profile)
    tau1 = tau(1, profile)
    s0_coeff = (m2 * m2 - m3 * m3) / (m1 * m1) / tau0
    if s0_coeff < 0:
        raise EstimationImpossibleError(
            "vacuum-term coefficient is negative; substituting the vacuum "
            "lower bound would not be conservative"
        )
    bracket = (
        math.exp(m2) * bounds.lower[1] / p2
        - math.exp(m3) * bounds.upper[2] / p3
        + (m2 * m2 - m3 * m3) / (m1 * m1)
        * (s0_lower / tau0 - math.exp(m1) * bounds.upper[0] / p1)
    )
    s1 = max(0.0, (m1 * tau1 / denom) * bracket)
    n1_mean = s1 * conditional_intensity(0, 1, profile)
    n1 = max(0.0, n1_mean - zeta(n1_mean, eps2))
    return s1, n1


def sigma_single_upper(obs: ChannelObservation, bounds: BasisBounds,
                       profile: IntensityProfile, s_W1_lower: float) -> float:
    """Upper bound on the single-pair conjugate-time mean-squared difference.

    Built from the mixture identity for the observed per-intensity
    spreads; requires a positive single-pair frame bound and decoy
    intensities that actually separate the single-pair weight.
    """
    p_mu2_1 = conditional_intensity(1, 1, profile)
    p_mu3_1 = conditional_intensity(2, 1, profile)
    if p_mu2_1 <= p_mu3_1:
        raise DegenerateProfileError(
            "sigma bound requires p(mu2|1) > p(mu3|1); the decoy intensities "
            "do not separate the single-pair weight"
        )
    if s_W1_lower <= 0:
        raise EstimationImpossibleError(
            "single-pair conjugate-basis frame bound is zero: the mean-squared "
            "difference cannot be certified and the protocol must abort"
        )
    numerator = (bounds.upper[1] * obs.sigma2_W_mu[1]
                 - bounds.lower[2] * obs.sigma2_W_mu[2])
    return max(0.0, numerator / (s_W1_lower * (p_mu2_1 - p_mu3_1)))


def l1_distance_upper(sigma2_W1_upper: float, delta: float) -> float:
    """Convert the mean-squared difference bound to an L1 distance in bins.

    sqrt(2/pi) relates the L1 distance of jointly Gaussian outcomes to
    their root-mean-square difference; 1/delta normalizes to bins.
    """
    if sigma2_W1_upper < 0:
        raise ValueError("sigma2_W1_upper must be non-negative")
    if delta <= 0:
        raise ValueError("delta must be strictly positive")
    return math.sqrt(2.0 / math.pi * sigma2_W1_upper) / delta


@dataclass(frozen=True)
class DecoyBounds:
    """Everything the key-length formula needs from parameter estimation."""

    n_T_upper: tuple[float, float, float]
    n_T_lower: tuple[float, float, float]
    n_W_upper: tuple[float, float, float]
    n_W_lower: tuple[float, float, float]
    s_T0_lower: float
    s_T1_lower: float
    n_T0_lower: float
    n_T1_lower: float
    n_T01_lower: float
    s_W1_lower: float
    sigma2_W1_upper: float
    d_W1_upper: float


def estimate_bounds(obs: ChannelObservation, profile: IntensityProfile,
                    budget: SecurityBudget, delta: float) -> DecoyBounds:
    """Run the full decoy estimation chain on one observation.

    When the conjugate-basis single-pair bound degenerates to zero the
    distance bound is reported as infinity, which the key-length stage
    turns into a distance abort.
    """
    t_bounds, w_bounds = intensity_bounds(obs, budget.eps_1)

    s_t0, n_t0 = vacuum_bound(t_bounds, profile)
    s_t1, n_t1 = single_bound(t_bounds, profile, s_t0, budget.eps_2)

    s_w0, _ = vacuum_bound(w_bounds, profile)
    s_w1, _ = single_bound(w_bounds, profile, s_w0, budget.eps_2)
    if s_w1 > 0:
        sigma2_w1 = sigma_single_upper(obs, w_bounds, profile, s_w1)
        d_w1 = l1_distance_upper(sigma2_w1, delta)
    else:
        sigma2_w1 = math.inf
        d_w1 = math.inf

    return DecoyBounds(
        n_T_upper=t_bounds.upper,
        n_T_lower=t_bounds.lower,
        n_W_upper=w_bounds.upper,
        n_W_lower=w_bounds.lower,
        s_T0_lower=s_t0,
        s_T1_lower=s_t1,
        n_T0_lower=n_t0,
        n_T1_lower=n_t1,
        n_T01_lower=n_t0 + n_t1,
        s_W1_lower=s_w1,
        sigma2_W1_upper=sigma2_w1,
        d_W1_upper=d_w1,
    )
