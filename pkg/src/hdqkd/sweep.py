"""Parameter sweeps over the key-rate pipeline, with CSV output.

Grid points are independent pure evaluations; they may run in a process
pool, but rows are always emitted in grid order and the serialized CSV
is byte-identical for any degree of parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .config import bundle_from_document, override_document
from .pipeline import evaluate
from .security import ABORT_NONE, d_min

__all__ = [
    "BetaScanResult",
    "CSV_HEADER",
    "NoFeasiblePointError",
    "SweepRow",
    "SweepSpec",
    "grid_values",
    "optimize_beta",
    "rows_to_csv",
    "run_sweep",
]

SWEEP_VARIABLES = {
    "distance_km": "session",
    "running_time_s": "session",
    "delta": "protocol",
    "beta_D": "protocol",
    "d0": "protocol",
}


class NoFeasiblePointError(RuntimeError):
    """Every grid point aborted; there is nothing to optimize."""


def grid_values(start: float, stop: float, count: int,
                spacing: str = "linear") -> tuple[float, ...]:
    """Monotone value grid, linear or logarithmic."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if count == 1:
        return (float(start),)
    if spacing == "linear":
        step = (stop - start) / (count - 1)
        return tuple(start + i * step for i in range(count))
    if spacing == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log spacing requires positive endpoints")
        la, lb = math.log10(start), math.log10(stop)
        step = (lb - la) / (count - 1)
        return tuple(10.0 ** (la + i * step) for i in range(count))
    raise ValueError(f"unknown spacing {spacing!r}")


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable, its value grid, and fixed config overrides."""

    variable: str
    values: tuple[float, ...]
    overrides: tuple[str, ...] = ()

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(
                f"variable must be one of {sorted(SWEEP_VARIABLES)}, "
                f"got {self.variable!r}"
            )
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("values must be non-empty")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("values must be strictly monotone")


@dataclass(frozen=True)
class SweepRow:
    """One evaluated grid point, in the fixed CSV column order."""

    value: float
    ell_bits: float
    rate_bps: float
    pie: float
    n_T_mu1: float
    n_T01_lower: float
    delta_fluct: float
    d_min: float
    d_W1_upper: float
    abort_reason: str


CSV_HEADER = ("value,ell_bits,rate_bps,pie,n_T_mu1,n_T01_lower,"
              "delta_fluct,d_min,d_W1_upper,abort_reason")


def _point_document(doc: Mapping[str, Any], spec: SweepSpec,
                    value: float) -> dict:
    section = SWEEP_VARIABLES[spec.variable]
    out = override_document(doc, spec.overrides)
    out = override_document(out, [(f"{section}.{spec.variable}", value)])
    return out


def _eval_point(args: tuple[Mapping[str, Any], SweepSpec, float]) -> SweepRow:
    doc, spec, value = args
    bundle = bundle_from_document(_point_document(doc, spec, value))
    result = evaluate(bundle)
    rep = result.report
    return SweepRow(
        value=value,
        ell_bits=rep.ell_bits,
        rate_bps=rep.rate_bps,
        pie=rep.pie,
        n_T_mu1=result.observation.n_T_mu[0],
        n_T01_lower=result.bounds.n_T01_lower,
        delta_fluct=rep.delta_fluct,
        d_min=rep.d_min,
        d_W1_upper=result.bounds.d_W1_upper,
        abort_reason=rep.abort_reason,
    )


def run_sweep(doc: Mapping[str, Any], spec: SweepSpec,
              parallel: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in grid order.

    Configuration errors raised while building a point's bundle abort
    the whole sweep; per-point protocol aborts become rows with zero
    rate and the abort reason.
    """
    jobs = [(dict(doc), spec, v) for v in spec.values]
    if parallel <= 1 or len(jobs) == 1:
        return [_eval_point(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(_eval_point, jobs))


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def rows_to_csv(rows: Iterable[SweepRow],
                extra_columns: Mapping[str, Sequence[float]] | None = None) -> str:
    """Serialize rows with the fixed header; floats at 9 significant digits."""
    rows = list(rows)
    header = CSV_HEADER
    extras: list[tuple[str, Sequence[float]]] = []
    if extra_columns:
        for name, col in extra_columns.items():
            if len(col) != len(rows):
                raise ValueError(f"extra column {name!r} has wrong length")
            extras.append((name, col))
        header = header + "," + ",".join(name for name, _ in extras)
    lines = [header]
    for i, row in enumerate(rows):
        cells = [
            _fmt(row.value), _fmt(row.ell_bits), _fmt(row.rate_bps),
            _fmt(row.pie), _fmt(row.n_T_mu1), _fmt(row.n_T01_lower),
            _fmt(row.delta_fluct), _fmt(row.d_min), _fmt(row.d_W1_upper),
            row.abort_reason,
        ]
        cells.extend(_fmt(col[i]) for _, col in extras)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BetaScanResult:
    """Dispersion-strength scan: full curve plus the located maximum."""

    rows: tuple[SweepRow, ...]
    effective_d0: tuple[float, ...]
    best_beta: float
    best_rate: float


def optimize_beta(doc: Mapping[str, Any], values: Sequence[float],
                  parallel: int = 1, d0_margin: float = 0.5,
                  overrides: Sequence[str] = ()) -> BetaScanResult:
    """Scan the GVD strength and locate the rate-maximizing value.

    A fixed threshold would abort every strong-dispersion point (the
    no-eavesdropper distance grows with beta_D), so each grid point runs
    with the effective threshold max(configured d0, d_min + d0_margin),
    recorded in the result.
    """
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError("values must be non-empty")
    base = override_document(doc, overrides)

    jobs = []
    d0_eff_list = []
    for beta in values:
        point = override_document(base, [("protocol.beta_D", beta)])
        bundle = bundle_from_document(point)
        d0_eff = max(bundle.params.d0, d_min(bundle.params) + d0_margin)
        d0_eff_list.append(d0_eff)
        point = override_document(point, [("protocol.d0", d0_eff)])
        spec = SweepSpec(variable="beta_D", values=(beta,))
        jobs.append((point, spec, beta))

    if parallel <= 1 or len(jobs) == 1:
        rows = [_eval_point(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(_eval_point, jobs))

    feasible = [(row.rate_bps, -i) for i, row in enumerate(rows)
                if row.abort_reason == ABORT_NONE and row.rate_bps > 0]
    if not feasible:
        raise NoFeasiblePointError(
            "every grid point aborted or produced zero rate"
        )
    best_rate, neg_i = max(feasible)
    best = rows[-neg_i]
    return BetaScanResult(
        rows=tuple(rows),
        effective_d0=tuple(d0_eff_list),
        best_beta=best.value,
        best_rate=best_rate,
    )
