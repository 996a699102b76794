"""Protocol configuration: typed parameter bundles, validation, TOML loading.

Every quantity carries a fixed unit; the config format has no unit
annotations, so the documented units below are mandatory:

    eta_d       detector efficiency                 (dimensionless, 0-1)
    Y0          dark-count rate                     (Hz)
    sigma_jit   detector time jitter                (ps)
    alpha       fiber-loss coefficient              (dB/km)
    beta_D      GVD coefficient magnitude           (ps^2)
    R_rep       clock / pump repetition rate        (Hz)
    sigma_cor   biphoton correlation time           (ps)
    sigma_coh   pump coherence time                 (ps)
    T_f         frame duration                      (ps)
    delta       time-bin duration                   (ps)
    beta_e      reconciliation efficiency           (dimensionless, 0-1)
    q           time-basis selection probability    (dimensionless, 0-1)
    d0          threshold code distance             (bins)
    p_alpha     cross-frame detection probability   (dimensionless, 0-1)

Configuration documents are TOML with four sections, keys named exactly
as the dataclass fields:

    [protocol]    physical and protocol constants (see ``ProtocolParams``)
    [intensities] decoy intensities ``mu`` and probabilities ``p_mu``
    [security]    failure-probability budget (all keys optional)
    [session]     ``distance_km``, ``running_time_s``, optional ``block_size``

Loading is pure: the same document text always produces the same bundle,
and every rejected document raises :class:`ConfigError` naming the single
violated invariant.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, NamedTuple

try:  # Python >= 3.11
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as _toml


class ConfigError(ValueError):
    """A configuration document is malformed or violates an invariant."""


_SECTIONS = ("protocol", "intensities", "security", "session")

_PROTOCOL_REQUIRED = (
    "eta_d", "Y0", "sigma_jit", "alpha", "beta_D", "R_rep",
    "sigma_cor", "sigma_coh", "delta", "beta_e", "q",
)
_PROTOCOL_OPTIONAL = ("T_f", "d0", "p_alpha", "ec_model")

#: Reconciliation-cost models for the error-correction leakage term.
#: "timing-gaussian" prices reconciliation against the Gaussian timing
#: channel; "alphabet" charges only the (1 - beta_e) inefficiency on the
#: raw alphabet bits (an idealized reconciliation code).
EC_MODELS = ("timing-gaussian", "alphabet")
_SECURITY_KEYS = (
    "eps_total", "eps_c", "eps_s", "eps_smooth", "eps_1", "eps_2", "eps_hash",
)
_SESSION_KEYS = ("distance_km", "running_time_s", "block_size")


def _as_float(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{section}] {key} must be a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ProtocolParams:
    """Physical and protocol constants. Units as in the module docstring."""

    eta_d: float
    Y0: float
    sigma_jit: float
    alpha: float
    beta_D: float
    R_rep: float
    sigma_cor: float
    sigma_coh: float
    T_f: float
    delta: float
    beta_e: float
    q: float
    d0: float = 2.0
    p_alpha: float = 0.0
    ec_model: str = "timing-gaussian"

    def __post_init__(self):
        for name in ("sigma_cor", "sigma_jit", "delta", "T_f", "sigma_coh"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be strictly positive")
        if not (self.sigma_cor < self.sigma_jit <= self.delta < self.T_f):
            raise ConfigError(
                "time scales must satisfy sigma_cor < sigma_jit <= delta < T_f"
            )
        ratio = self.T_f / self.delta
        if abs(ratio - round(ratio)) > 1e-9 * ratio or round(ratio) < 2:
            raise ConfigError("T_f/delta must be an integer >= 2 (alphabet size)")
        if not (0.0 < self.eta_d <= 1.0):
            raise ConfigError("eta_d must lie in (0, 1]")
        if self.Y0 < 0:
            raise ConfigError("Y0 must be non-negative")
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if self.beta_D <= 0:
            raise ConfigError("beta_D must be strictly positive")
        if self.R_rep <= 0:
            raise ConfigError("R_rep must be strictly positive")
        if not (0.0 < self.beta_e <= 1.0):
            raise ConfigError("beta_e must lie in (0, 1]")
        if not (0.0 < self.q < 1.0):
            raise ConfigError("q must lie strictly inside (0,1)")
        if self.d0 <= 0:
            raise ConfigError("d0 must be strictly positive")
        if not (0.0 <= self.p_alpha < 1.0):
            raise ConfigError("p_alpha must lie in [0, 1)")
        if self.ec_model not in EC_MODELS:
            raise ConfigError(f"ec_model must be one of {EC_MODELS}")

    @property
    def alphabet_size(self) -> int:
        """Number of time bins per frame, T_f/delta."""
        return int(round(self.T_f / self.delta))

    @property
    def raw_bits_per_frame(self) -> float:
        """log2(T_f/delta), raw key bits per basis-matched coincidence."""
        return math.log2(self.T_f / self.delta)

    @property
    def dark_click_probability(self) -> float:
        """Per-frame dark-click probability, Y0 * T_f (T_f converted to s)."""
        return self.Y0 * self.T_f * 1e-12


@dataclass(frozen=True)
class IntensityProfile:
    """Decoy intensities mu1 > mu2 > mu3 and their selection probabilities."""

    mu: tuple[float, float, float]
    p_mu: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(float(m) for m in self.mu))
        object.__setattr__(self, "p_mu", tuple(float(p) for p in self.p_mu))
        if len(self.mu) != 3 or len(self.p_mu) != 3:
            raise ConfigError("mu and p_mu must each have exactly 3 entries")
        m1, m2, m3 = self.mu
        if not (m1 > m2 > m3 >= 0):
            raise ConfigError("intensities must satisfy mu1 > mu2 > mu3 >= 0")
        if not (m2 + m3 < m1):
            # keeps the single-pair bound's denominator mu1(mu2-mu3)-(mu2^2-mu3^2) positive
            raise ConfigError("intensities must satisfy mu2 + mu3 < mu1")
        if any(p <= 0 for p in self.p_mu):
            raise ConfigError("intensity probabilities must be strictly positive")
        if abs(sum(self.p_mu) - 1.0) > 1e-12:
            raise ConfigError("intensity probabilities must sum to 1 within 1e-12")


@dataclass(frozen=True)
class SecurityBudget:
    """Failure-probability budget for the finite-key analysis.

    ``eps_s`` is split internally: the smoothing and the two estimation
    failures get eps_s/8 each, leaving eps_s/4 for the statistical
    fluctuation term.  All members are overridable in the config.
    """

    eps_total: float
    eps_c: float
    eps_s: float
    eps_smooth: float
    eps_1: float
    eps_2: float
    eps_hash: float

    def __post_init__(self):
        for name in ("eps_total", "eps_c", "eps_s", "eps_smooth", "eps_1",
                     "eps_2", "eps_hash"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ConfigError(f"{name} must lie strictly inside (0, 1)")
        if self.eps_c + self.eps_s > self.eps_total * (1 + 1e-12):
            raise ConfigError("eps_c + eps_s must not exceed eps_total")
        if self.eps_hash > self.eps_c * (1 + 1e-12):
            raise ConfigError("eps_hash must not exceed eps_c")

    @classmethod
    def from_total(cls, eps_total: float = 1e-10) -> "SecurityBudget":
        """Default split: eps_c = eps_hash = eps_s = eps_total/2, and
        eps_smooth = eps_1 = eps_2 = eps_s/8."""
        eps_half = eps_total / 2.0
        return cls(
            eps_total=eps_total,
            eps_c=eps_half,
            eps_s=eps_half,
            eps_smooth=eps_half / 8.0,
            eps_1=eps_half / 8.0,
            eps_2=eps_half / 8.0,
            eps_hash=eps_half,
        )


@dataclass(frozen=True)
class SessionSpec:
    """One protocol session: fiber length, duration, total pump pulses."""

    distance_km: float
    running_time_s: float
    block_size: float

    def __post_init__(self):
        if self.distance_km < 0:
            raise ConfigError("distance_km must be non-negative")
        if self.running_time_s <= 0:
            raise ConfigError("running_time_s must be strictly positive")
        if self.block_size < 1:
            raise ConfigError("block_size must be at least 1")


class ConfigBundle(NamedTuple):
    params: ProtocolParams
    profile: IntensityProfile
    budget: SecurityBudget
    session: SessionSpec


def parse_document(text: str) -> dict:
    """Parse a TOML config document into a plain dict. Raises ConfigError."""
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    for section in doc:
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
    return doc


def bundle_from_document(doc: Mapping[str, Any]) -> ConfigBundle:
    """Validate a parsed document and build the typed parameter bundle."""
    for section in ("protocol", "intensities", "session"):
        if section not in doc:
            raise ConfigError(f"missing required section [{section}]")

    proto = dict(doc["protocol"])
    for key in proto:
        if key not in _PROTOCOL_REQUIRED + _PROTOCOL_OPTIONAL:
            raise ConfigError(f"[protocol] unknown key {key!r}")
    for key in _PROTOCOL_REQUIRED:
        if key not in proto:
            raise ConfigError(f"[protocol] missing required key {key!r}")
    ec_model = proto.pop("ec_model", "timing-gaussian")
    if not isinstance(ec_model, str):
        raise ConfigError("[protocol] ec_model must be a string")
    kwargs = {k: _as_float("protocol", k, proto[k]) for k in proto}
    # frame duration defaults to the pump coherence time
    kwargs.setdefault("T_f", kwargs["sigma_coh"])
    params = ProtocolParams(ec_model=ec_model, **kwargs)

    intens = dict(doc["intensities"])
    for key in intens:
        if key not in ("mu", "p_mu"):
            raise ConfigError(f"[intensities] unknown key {key!r}")
    for key in ("mu", "p_mu"):
        if key not in intens:
            raise ConfigError(f"[intensities] missing required key {key!r}")
        if not isinstance(intens[key], (list, tuple)):
            raise ConfigError(f"[intensities] {key} must be a list of 3 numbers")
    profile = IntensityProfile(mu=tuple(intens["mu"]), p_mu=tuple(intens["p_mu"]))

    sec = dict(doc.get("security", {}))
    for key in sec:
        if key not in _SECURITY_KEYS:
            raise ConfigError(f"[security] unknown key {key!r}")
    eps_total = _as_float("security", "eps_total", sec.get("eps_total", 1e-10))
    defaults = SecurityBudget.from_total(eps_total)
    budget = SecurityBudget(
        eps_total=eps_total,
        eps_c=_as_float("security", "eps_c", sec.get("eps_c", defaults.eps_c)),
        eps_s=_as_float("security", "eps_s", sec.get("eps_s", defaults.eps_s)),
        eps_smooth=_as_float("security", "eps_smooth",
                             sec.get("eps_smooth", defaults.eps_smooth)),
        eps_1=_as_float("security", "eps_1", sec.get("eps_1", defaults.eps_1)),
        eps_2=_as_float("security", "eps_2", sec.get("eps_2", defaults.eps_2)),
        eps_hash=_as_float("security", "eps_hash",
                           sec.get("eps_hash", defaults.eps_hash)),
    )

    sess = dict(doc["session"])
    for key in sess:
        if key not in _SESSION_KEYS:
            raise ConfigError(f"[session] unknown key {key!r}")
    for key in ("distance_km", "running_time_s"):
        if key not in sess:
            raise ConfigError(f"[session] missing required key {key!r}")
    running = _as_float("session", "running_time_s", sess["running_time_s"])
    block = sess.get("block_size", params.R_rep * running)
    session = SessionSpec(
        distance_km=_as_float("session", "distance_km", sess["distance_km"]),
        running_time_s=running,
        block_size=_as_float("session", "block_size", block),
    )

    return ConfigBundle(params, profile, budget, session)


def load_config(text: str) -> ConfigBundle:
    """Parse and validate a config document. Pure: text -> bundle."""
    return bundle_from_document(parse_document(text))


def load_config_file(path: str | Path) -> ConfigBundle:
    return load_config(Path(path).read_text())


def _parse_override_value(raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    try:
        return _toml.loads(f"v = {raw}")["v"]
    except _toml.TOMLDecodeError:
        pass
    if "," in raw:
        try:
            return [float(part) for part in raw.split(",")]
        except ValueError:
            pass
    return raw


def override_document(doc: Mapping[str, Any],
                      overrides: Iterable[Any]) -> dict:
    """Apply ``key=value`` overrides to a parsed document.

    Keys may be section-qualified (``protocol.delta``) or bare
    (``delta``); a bare key must resolve to exactly one section.  Values
    are parsed as TOML scalars, with ``a,b,c`` accepted for float lists.
    """
    out = copy.deepcopy(dict(doc))
    for item in overrides:
        if isinstance(item, str):
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not of the form key=value")
            key, _, raw = item.partition("=")
            key = key.strip()
            value = _parse_override_value(raw.strip())
        else:
            key, value = item
            value = _parse_override_value(value)
        if "." in key:
            section, _, field = key.partition(".")
            if section not in _SECTIONS:
                raise ConfigError(f"override references unknown section {section!r}")
        else:
            field = key
            known = {
                "protocol": _PROTOCOL_REQUIRED + _PROTOCOL_OPTIONAL,
                "intensities": ("mu", "p_mu"),
                "security": _SECURITY_KEYS,
                "session": _SESSION_KEYS,
            }
            hits = [s for s, keys in known.items() if field in keys]
            if len(hits) != 1:
                raise ConfigError(f"override key {field!r} is not a known config key")
            section = hits[0]
        out.setdefault(section, {})
        out[section][field] = value
    return out


def beta_from_dispersion(D: float) -> float:
    """Convert a dispersion coefficient in ps/nm to a GVD magnitude in ps^2.

    Linear empirical anchor: 1e5 ps/nm corresponds to 2e6 ps^2, i.e. a
    factor of exactly 20.
    """
    if D <= 0:
        raise ConfigError("dispersion must be strictly positive")
    return 20.0 * D
