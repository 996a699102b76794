"""Time / conjugate-time measurement overlap from chirped-Gaussian integrals.

The incompatibility of a direct timing measurement and a timing
measurement behind a group-velocity-dispersion element reduces, after
completing the square in the frequency integral, to the squared modulus
of the Fresnel-type tail integral

    F(v) = integral_v^inf exp(-i u^2) du.

As v decreases below the stationary point the Cornu spiral overshoots
the full-line value |F(-inf)|^2 = pi before settling onto it; the
supremum over v exceeds pi by a constant factor of about 1.37.  That
factor is what separates the physical (positive-frequency) overlap from
the dilated, projective-measurement one:

    c_dilated(delta, beta_D)  = delta^2 / (2 pi^2 beta_D)          (closed form)
    c_discrete(delta, beta_D) = overshoot * c_dilated(delta, beta_D)

Using the dilated overlap in the key-length bound would overstate the
measurement incompatibility; the engine therefore always uses its own
computed overshoot constant, never a rounded literal.

Quadrature strategy: exp(-i u^2) is not absolutely integrable, so the
tail is split at a finite cut A.  The head [x, A] is integrated with
adaptive quadrature; the remaining tail is evaluated by the asymptotic
expansion obtained from repeated integration by parts (four terms, with
a rigorous remainder bound 15/(16 A^7) that fixes the cut).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from scipy.integrate import quad

__all__ = [
    "FULL_LINE_TAIL",
    "OverlapResult",
    "QuadratureError",
    "VacuousOverlapError",
    "cbar_infinity",
    "compute_overlap",
    "fresnel_tail",
    "overlap_dilated",
    "overlap_discrete",
    "overshoot_argmax",
    "overshoot_constant",
]

#: Full-line value integral_{-inf}^{inf} exp(-i u^2) du = sqrt(pi) e^{-i pi/4}.
FULL_LINE_TAIL = complex(math.sqrt(math.pi / 2), -math.sqrt(math.pi / 2))

_TWO_PI_SQ = 2.0 * math.pi**2


class QuadratureError(RuntimeError):
    """Requested tolerance could not be met within the iteration budget."""


class VacuousOverlapError(ValueError):
    """The discrete overlap is >= 1, so the uncertainty bound is vacuous.

    Signals that the time-bin duration is too large for the configured
    dispersion strength.  The offending value is stored in ``value``.
    """

    def __init__(self, value: float):
        super().__init__(
            f"discrete overlap {value:.6g} >= 1: uncertainty relation is "
            "vacuous (time bin too large for this dispersion strength)"
        )
        self.value = value


def _asymptotic_cut(abs_tol: float) -> float:
    # remainder of the 4-term expansion is bounded by 15/(16 A^7)
    return max(12.0, (1.875 / abs_tol) ** (1.0 / 7.0))


def _tail_asymptotic(a: float) -> complex:
    """integral_a^inf exp(-i u^2) du for large a > 0, by parts (4 terms)."""
    phase = complex(math.cos(a * a), -math.sin(a * a))
    series = (
        -0.5j / a
        + 0.25 / a**3
        + 0.375j / a**5
        - 0.9375 / a**7
    )
    return phase * series


def _quad_complex(lo: float, hi: float, abs_tol: float) -> complex:
    if hi <= lo:
        return 0.0 + 0.0j
    # subinterval budget scales with the number of oscillations of cos(u^2)
    limit = 200 + int(20.0 * (hi * hi - lo * lo))
    re, re_err = quad(lambda u: math.cos(u * u), lo, hi,
                      epsabs=abs_tol / 2, epsrel=1e-12, limit=limit)
    im, im_err = quad(lambda u: math.sin(u * u), lo, hi,
                      epsabs=abs_tol / 2, epsrel=1e-12, limit=limit)
    if re_err > abs_tol or im_err > abs_tol:
        raise QuadratureError(
            f"quadrature on [{lo:g}, {hi:g}] reports error "
            f"{max(re_err, im_err):.3g} > requested {abs_tol:.3g}"
        )
    return complex(re, -im)


def fresnel_tail(x: float, abs_tol: float = 1e-10) -> complex:
    """Evaluate F(x) = integral_x^inf exp(-i u^2) du.

    Accurate to ``abs_tol`` in each of the real and imaginary parts.
    Negative x is handled through the reflection identity
    F(x) + F(-x) = F(-inf) = sqrt(pi) e^{-i pi/4}.
    """
    if abs_tol <= 0:
        raise ValueError("abs_tol must be strictly positive")
    if x < 0:
        return FULL_LINE_TAIL - fresnel_tail(-x, abs_tol / 2)
    cut = _asymptotic_cut(abs_tol / 2)
    if x >= cut:
        return _tail_asymptotic(x)
    return _quad_complex(x, cut, abs_tol / 2) + _tail_asymptotic(cut)


def _tail_sq_modulus(v: float, abs_tol: float) -> float:
    return abs(fresnel_tail(v, abs_tol)) ** 2


# The overshoot constant is expensive enough to warrant caching; the cache
# is write-once per tolerance and the computation is deterministic, so a
# racing first use at worst recomputes the identical value.
_cache_lock = threading.Lock()
_overshoot_cache: dict[float, tuple[float, float]] = {}

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _maximize_tail_sq(rel_tol: float) -> tuple[float, float]:
    """Locate sup_v |F(v)|^2 by coarse scan then golden-section refinement."""
    quad_tol = max(1e-13, rel_tol * 1e-3)

    # coarse scan over the first Cornu-spiral lobe; guards the bracket
    # against landing on a secondary ripple
    n_scan = 101
    vs = [-5.0 + 5.0 * i / (n_scan - 1) for i in range(n_scan)]
    vals = [_tail_sq_modulus(v, quad_tol) for v in vs]
    k = max(range(n_scan), key=vals.__getitem__)
    if k in (0, n_scan - 1):
        raise QuadratureError("failed to bracket the overlap maximum in [-5, 0]")
    a, b = vs[k - 1], vs[k + 1]

    # golden-section: near the maximum the objective is quadratic, so an
    # argument window w gives a value error O(w^2)
    target_width = math.sqrt(rel_tol) * 0.5
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _tail_sq_modulus(c, quad_tol)
    fd = _tail_sq_modulus(d, quad_tol)
    for _ in range(200):
        if b - a <= target_width:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _tail_sq_modulus(c, quad_tol)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _tail_sq_modulus(d, quad_tol)
    else:
        raise QuadratureError("golden-section refinement did not converge")
    v_star = (a + b) / 2.0
    return v_star, _tail_sq_modulus(v_star, quad_tol)


def _overshoot_entry(rel_tol: float) -> tuple[float, float]:
    if not (1e-10 < rel_tol <= 1e-2):
        raise ValueError("rel_tol must lie in (1e-10, 1e-2]")
    with _cache_lock:
        if rel_tol in _overshoot_cache:
            return _overshoot_cache[rel_tol]
    v_star, peak = _maximize_tail_sq(rel_tol)
    entry = (v_star, peak / math.pi)
    with _cache_lock:
        _overshoot_cache.setdefault(rel_tol, entry)
        return _overshoot_cache[rel_tol]


def overshoot_constant(rel_tol: float = 1e-6) -> float:
    """Ratio sup_v |F(v)|^2 / pi, the Cornu-spiral overshoot (about 1.37)."""
    return _overshoot_entry(rel_tol)[1]


def overshoot_argmax(rel_tol: float = 1e-6) -> float:
    """Location v* of the maximizing lower integration limit (negative)."""
    return _overshoot_entry(rel_tol)[0]


def cbar_infinity(beta_D: float, omega_min_detuning: float = 0.0) -> float:
    """Continuous-measurement overlap density in ps^-2.

    Equals overshoot_constant() / (2 pi^2 beta_D).  The lower frequency
    limit ``omega_min_detuning`` (rad/ps) is accepted for interface
    completeness but does not affect the result: the supremum over the
    time shift sweeps the rescaled integration limit over the whole real
    line, absorbing any finite lower frequency cut.
    """
    if beta_D <= 0:
        raise ValueError("beta_D must be strictly positive")
    if not math.isfinite(omega_min_detuning):
        raise ValueError("omega_min_detuning must be finite")
    return overshoot_constant() / (_TWO_PI_SQ * beta_D)


def overlap_dilated(delta: float, beta_D: float) -> float:
    """Overlap for the dilated (projective) measurements: delta^2/(2 pi^2 beta_D)."""
    if delta <= 0:
        raise ValueError("delta must be strictly positive")
    if beta_D <= 0:
        raise ValueError("beta_D must be strictly positive")
    return delta * delta / (_TWO_PI_SQ * beta_D)


def overlap_discrete(delta: float, beta_D: float) -> float:
    """Overlap of the binned time and conjugate-time measurements.

    Raises :class:`VacuousOverlapError` if the value reaches 1, in which
    case the uncertainty bound carries no information.
    """
    if delta <= 0:
        raise ValueError("delta must be strictly positive")
    c = cbar_infinity(beta_D) * delta * delta
    if c >= 1.0:
        raise VacuousOverlapError(c)
    return c


@dataclass(frozen=True)
class OverlapResult:
    """Bundle of overlap quantities for one (delta, beta_D) pair."""

    c_bar_inf: float      # continuous overlap density (ps^-2)
    c_discrete: float     # binned overlap (dimensionless; may be >= 1)
    c_dilated: float      # dilated closed form (dimensionless)
    overshoot: float      # c_discrete / c_dilated
    argmax_v: float       # maximizing lower limit in rescaled units

    @property
    def vacuous(self) -> bool:
        return self.c_discrete >= 1.0


def compute_overlap(delta: float, beta_D: float) -> OverlapResult:
    """Evaluate all overlap quantities; never raises on a vacuous bound."""
    if delta <= 0 or beta_D <= 0:
        raise ValueError("delta and beta_D must be strictly positive")
    cbar = cbar_infinity(beta_D)
    return OverlapResult(
        c_bar_inf=cbar,
        c_discrete=cbar * delta * delta,
        c_dilated=overlap_dilated(delta, beta_D),
        overshoot=overshoot_constant(),
        argmax_v=overshoot_argmax(),
    )
