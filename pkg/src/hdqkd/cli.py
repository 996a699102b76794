"""Command-line interface.

Subcommands:

    keyrate        evaluate one session, print the report as JSON
    sweep          sweep one variable, emit CSV (or JSON) rows
    optimize-beta  scan the GVD strength for the rate maximum
    overlap        print the measurement-overlap quantities as JSON
    threshold      print the no-eavesdropper minimum distance and d0

Exit codes: 0 on success (positive key for ``keyrate``), 2 when the
protocol aborts (reason in the JSON output), 1 on configuration or
usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .config import (
    ConfigError,
    bundle_from_document,
    override_document,
    parse_document,
)
from .decoy import DegenerateProfileError
from .overlap import compute_overlap, overlap_dilated
from .pipeline import evaluate
from .security import ABORT_NONE, InfeasiblePAlphaError, d_min
from .sweep import (
    NoFeasiblePointError,
    SweepSpec,
    grid_values,
    optimize_beta,
    rows_to_csv,
    run_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ABORT = 2


def _load_document(args) -> dict:
    text = Path(args.config).read_text()
    doc = parse_document(text)
    if getattr(args, "set", None):
        doc = override_document(doc, args.set)
    return doc


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _report_json(result) -> str:
    rep = dataclasses.asdict(result.report)
    rep["n_T_mu1"] = result.observation.n_T_mu[0]
    rep["n_T01_lower"] = result.bounds.n_T01_lower
    rep["d_W1_upper"] = result.bounds.d_W1_upper
    rep["c_discrete"] = result.c_discrete
    return json.dumps(rep, indent=2, sort_keys=True) + "\n"


def _cmd_keyrate(args) -> int:
    bundle = bundle_from_document(_load_document(args))
    result = evaluate(bundle, seed=args.seed)
    _emit(_report_json(result), args.output)
    rep = result.report
    if rep.abort_reason != ABORT_NONE or rep.ell_bits <= 0:
        return EXIT_ABORT
    return EXIT_OK


def _cmd_sweep(args) -> int:
    doc = _load_document(args)
    if args.values:
        values = tuple(float(v) for v in args.values.split(","))
    else:
        if args.start is None or args.stop is None or args.count is None:
            raise ConfigError("sweep needs either --values or --start/--stop/--count")
        values = grid_values(args.start, args.stop, args.count, args.spacing)
    spec = SweepSpec(variable=args.variable, values=values)
    rows = run_sweep(doc, spec, parallel=args.parallel)
    if args.out == "json":
        payload = [dataclasses.asdict(r) for r in rows]
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        _emit(rows_to_csv(rows), args.output)
    return EXIT_OK


def _cmd_optimize_beta(args) -> int:
    doc = _load_document(args)
    values = grid_values(args.start, args.stop, args.count, "log")
    scan = optimize_beta(doc, values, parallel=args.parallel,
                         d0_margin=args.d0_margin)
    if args.out == "json":
        payload = {
            "best_beta_ps2": scan.best_beta,
            "best_rate_bps": scan.best_rate,
            "curve": [
                dict(dataclasses.asdict(row), effective_d0=d0)
                for row, d0 in zip(scan.rows, scan.effective_d0)
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        _emit(rows_to_csv(scan.rows,
                          extra_columns={"effective_d0": scan.effective_d0}),
              args.output)
        print(f"best beta_D = {scan.best_beta:.9g} ps^2, "
              f"rate = {scan.best_rate:.9g} bits/s", file=sys.stderr)
    return EXIT_OK


def _cmd_overlap(args) -> int:
    if args.delta <= 0 or args.beta_D <= 0:
        raise ConfigError("delta and beta_D must be strictly positive")
    if args.dilated:
        payload = {
            "delta_ps": args.delta,
            "beta_D_ps2": args.beta_D,
            "c_dilated": overlap_dilated(args.delta, args.beta_D),
        }
    else:
        res = compute_overlap(args.delta, args.beta_D)
        payload = {
            "delta_ps": args.delta,
            "beta_D_ps2": args.beta_D,
            "c_bar_inf_per_ps2": res.c_bar_inf,
            "c_discrete": res.c_discrete,
            "c_dilated": res.c_dilated,
            "overshoot": res.overshoot,
            "argmax_v": res.argmax_v,
            "vacuous_bound": res.vacuous,
        }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return EXIT_OK


def _cmd_threshold(args) -> int:
    bundle = bundle_from_document(_load_document(args))
    dmin = d_min(bundle.params)
    payload = {
        "d_min_bins": dmin,
        "d0_bins": bundle.params.d0,
        "feasible": bundle.params.d0 > dmin,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return EXIT_OK


def _add_common(parser, config_required=True):
    parser.add_argument("--config", required=config_required,
                        help="path to a TOML configuration document")
    parser.add_argument("--set", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    parser.add_argument("--output", default=None,
                        help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdqkd",
        description=("Finite-key secret-key-rate engine for time-energy "
                     "high-dimensional QKD"),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyrate", help="evaluate one session")
    _add_common(p)
    p.add_argument("--seed", type=int, default=None,
                   help="use the seeded Poisson-sampling channel variant")
    p.set_defaults(func=_cmd_keyrate)

    p = sub.add_parser("sweep", help="sweep one variable")
    _add_common(p)
    p.add_argument("--variable", required=True,
                   choices=["distance_km", "running_time_s", "delta",
                            "beta_D", "d0"])
    p.add_argument("--values", default=None,
                   help="explicit comma-separated grid values")
    p.add_argument("--start", type=float, default=None)
    p.add_argument("--stop", type=float, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    p.add_argument("--out", choices=["csv", "json"], default="csv")
    p.add_argument("--parallel", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("optimize-beta",
                       help="scan the GVD strength for the rate maximum")
    _add_common(p)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, default=41)
    p.add_argument("--d0-margin", type=float, default=0.5,
                   help="bins added to d_min when raising the threshold")
    p.add_argument("--out", choices=["csv", "json"], default="csv")
    p.add_argument("--parallel", type=int, default=1)
    p.set_defaults(func=_cmd_optimize_beta)

    p = sub.add_parser("overlap", help="measurement-overlap quantities")
    p.add_argument("--delta", type=float, required=True, help="bin width (ps)")
    p.add_argument("--beta-d", dest="beta_D", type=float, required=True,
                   help="GVD magnitude (ps^2)")
    p.add_argument("--dilated", action="store_true",
                   help="report only the dilated closed form")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_overlap)

    p = sub.add_parser("threshold",
                       help="minimum distance vs configured threshold")
    _add_common(p)
    p.set_defaults(func=_cmd_threshold)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DegenerateProfileError, InfeasiblePAlphaError,
            NoFeasiblePointError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
