"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 input/output error,
3 internal-consistency violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from ..adversary import worst_case_no_limit, worst_case_rate_limited
from ..core import InternalConsistencyError, ValidationError, validate_spec
from ..ratio import solve_pi_star
from .config import ExperimentConfig, apply_overrides, load_config
from .ingest import ParseError, ingest_prices
from .report import emit_report, load_rows, rows_to_dicts
from .runner import run_episode, spec_from_calibration
from .sweeps import compare_policies, sweep_alpha, sweep_rate_limit

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


def _spec_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p-min", type=float, required=True)
    sub.add_argument("--p-max", type=float, required=True)
    sub.add_argument("--alpha", type=float, required=True)
    sub.add_argument("--capacity", default="1")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evcharge", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve-ratio", help="print the best maintainable ratio target")
    _spec_args(solve)

    adv = commands.add_parser("adversary", help="emit a worst-case price trace as CSV")
    _spec_args(adv)
    adv.add_argument("--pi", type=float, default=None, help="ratio target (default: solved)")
    adv.add_argument("--steps", type=int, default=1000)
    adv.add_argument("--rate-limited", action="store_true",
                     help="repeat each level capacity times (integer capacity)")
    adv.add_argument("--out", default=None, help="output CSV (default stdout)")

    sim = commands.add_parser("simulate", help="run policies over ingested price episodes")
    sim.add_argument("--config", default=None)
    sim.add_argument("--prices", default=None)
    sim.add_argument("--policies", default=None, help="comma-separated override")
    sim.add_argument("--alpha", type=float, default=None)
    sim.add_argument("--capacity", default=None)
    sim.add_argument("--out", default=None, help="output directory")

    sweep = commands.add_parser("sweep", help="sweep dissatisfaction price or rate limit")
    sweep.add_argument("--config", default=None)
    sweep.add_argument("--prices", default=None)
    sweep.add_argument("--out", default=None)
    mode = sweep.add_mutually_exclusive_group(required=True)
    mode.add_argument("--alpha-grid", default=None, help="comma list of p_min multiples")
    mode.add_argument("--rate-grid", default=None, help="comma list of rate factors")

    rep = commands.add_parser("report", help="re-emit a report in another format")
    rep.add_argument("--in", dest="src", required=True)
    rep.add_argument("--format", dest="fmt", required=True, choices=("csv", "json"))
    rep.add_argument("--out", default=None, help="output file (default stdout)")
    return parser


def _load_cfg(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for key in ("prices", "alpha", "capacity"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = args.out
    if getattr(args, "policies", None):
        overrides["policies"] = tuple(p.strip() for p in args.policies.split(","))
    return apply_overrides(cfg, **overrides)


def _cmd_solve_ratio(args) -> int:
    spec = validate_spec(args.p_min, args.p_max, args.alpha, args.capacity)
    sol = solve_pi_star(spec)
    payload = {
        "p_min": spec.p_min,
        "p_max": spec.p_max,
        "alpha": spec.alpha,
        "capacity": str(spec.capacity),
        "theta": spec.theta,
        "pi_star": sol.pi_star,
        "alpha_star": sol.alpha_star,
        "branch": sol.branch,
        "upper_bound": sol.upper_bound,
        "residual": sol.residual,
    }
    print(json.dumps(payload, indent=1))
    return EXIT_OK


def _cmd_adversary(args) -> int:
    spec = validate_spec(args.p_min, args.p_max, args.alpha, args.capacity)
    if args.rate_limited:
        trace = worst_case_rate_limited(spec, args.steps)
    else:
        pi = args.pi if args.pi is not None else solve_pi_star(spec).pi_star
        trace = worst_case_no_limit(spec, pi, args.steps)
    out = sys.stdout if args.out is None else open(args.out, "w", encoding="utf-8", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["slot", "price"])
        for i, price in enumerate(trace.prices):
            writer.writerow([i, repr(price)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = _load_cfg(args)
    if cfg.prices is None:
        raise ValidationError("simulate needs --prices or a config with a prices path")
    data = ingest_prices(cfg.prices, cfg)
    if not data.episodes:
        raise ValidationError(f"{cfg.prices}: no complete episodes")
    spec = spec_from_calibration(cfg, data.calibration)
    os.makedirs(cfg.out_dir, exist_ok=True)

    summary = []
    slot_rows = []
    for ep in data.episodes:
        for policy in cfg.policies:
            row, slots = run_episode(cfg, spec, ep.trace, policy, ep.date)
            summary.append(row)
            slot_rows.extend(slots)

    meta = {
        "p_min": data.calibration.p_min,
        "p_max": data.calibration.p_max,
        "alpha": spec.alpha,
        "capacity": str(spec.capacity),
        "pi_star": solve_pi_star(spec).pi_star,
        "episodes": len(data.episodes),
        "dropped_incomplete": data.dropped_incomplete,
        "dropped_out_of_range": data.dropped_out_of_range,
        "n_clamped": data.calibration.n_clamped,
    }
    with open(os.path.join(cfg.out_dir, "calibration.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")
    emit_report(summary, "csv", os.path.join(cfg.out_dir, "summary.csv"))
    emit_report(summary, "json", os.path.join(cfg.out_dir, "summary.json"))
    long_rows = []
    for s in rows_to_dicts(slot_rows):
        base = {k: s[k] for k in ("date", "policy", "slot")}
        for metric in ("price", "charge", "eta", "opt", "ratio"):
            long_rows.append({**base, "metric": metric, "value": s[metric]})
    emit_report(long_rows, "csv", os.path.join(cfg.out_dir, "slots.csv"))
    emit_report(compare_policies(cfg, data), "csv", os.path.join(cfg.out_dir, "compare.csv"))
    print(f"wrote {len(summary)} episode rows to {cfg.out_dir}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load_cfg(args)
    if args.alpha_grid is not None:
        cfg = apply_overrides(cfg, alpha_grid=tuple(float(x) for x in args.alpha_grid.split(",")))
        rows = sweep_alpha(cfg)
        name = "sweep_alpha"
    else:
        cfg = apply_overrides(cfg, rate_grid=tuple(float(x) for x in args.rate_grid.split(",")))
        rows = sweep_rate_limit(cfg)
        name = "sweep_rate"
    os.makedirs(cfg.out_dir, exist_ok=True)
    emit_report(rows, "csv", os.path.join(cfg.out_dir, f"{name}.csv"))
    emit_report(rows, "json", os.path.join(cfg.out_dir, f"{name}.json"))
    print(f"wrote {len(rows)} rows to {cfg.out_dir}/{name}.(csv|json)")
    return EXIT_OK


def _cmd_report(args) -> int:
    rows = load_rows(args.src)
    if args.out is None:
        if args.fmt == "json":
            print(json.dumps(rows, indent=1))
        else:
            writer = csv.writer(sys.stdout, lineterminator="\n")
            if rows:
                header = list(rows[0].keys())
                writer.writerow(header)
                for d in rows:
                    writer.writerow(["" if d[k] is None else
                                     (repr(d[k]) if isinstance(d[k], float) else str(d[k]))
                                     for k in header])
        return EXIT_OK
    emit_report(rows, args.fmt, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "solve-ratio": _cmd_solve_ratio,
    "adversary": _cmd_adversary,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
