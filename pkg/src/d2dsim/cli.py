"""Command-line front end: run campaigns, validate configs, dump traces, oracles."""

from __future__ import annotations

import argparse
import itertools
import sys

import numpy as np

from . import engine, rrm, signaling
from .config import (SCENARIO_PRESETS, ConfigError, ScenarioConfig,
                     apply_scenario, load_config)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2dsim",
        description="System-level simulator for D2D reuse of cellular uplink resources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a Monte-Carlo campaign")
    run_p.add_argument("--config", help="JSON config file (defaults apply otherwise)")
    run_p.add_argument("--scenario", choices=SCENARIO_PRESETS,
                       help="named preset applied on top of the config")
    run_p.add_argument("--drops", type=int, help="override the number of drops")
    run_p.add_argument("--seed", type=int, help="override the campaign seed")
    run_p.add_argument("--scheme", "--schemes", dest="schemes",
                       default=",".join(engine.SCHEMES),
                       help="comma-separated scheme list (default: all)")
    run_p.add_argument("--out", default="out", help="output directory (CSV + summary)")
    run_p.add_argument("--workers", type=int, default=None,
                       help=f"parallel drop workers (default ${engine.WORKERS_ENV} or 1)")
    run_p.add_argument("--quiet", action="store_true", help="suppress progress lines")

    val_p = sub.add_parser("validate-config", help="check a config file and exit")
    val_p.add_argument("--config", required=True)

    tr_p = sub.add_parser("trace-protocol", help="print a connection-setup trace")
    tr_p.add_argument("--topology", choices=("single-cell", "multi-cell"),
                      default="single-cell")
    tr_p.add_argument("--outcome", choices=("accepted", "rejected", "timeout"),
                      default="accepted")
    tr_p.add_argument("--model", choices=("A", "B"), default="A",
                      help="discovery model (announce vs solicit)")
    tr_p.add_argument("--retries", type=int, default=3, help="discovery retries")
    tr_p.add_argument("--out-of-coverage", action="store_true",
                      help="single-cell only: the non-requesting end lacks coverage")
    tr_p.add_argument("--out", default="-", help="output file, '-' for stdout")

    or_p = sub.add_parser("oracle", help="run the built-in solver cross-checks")
    or_p.add_argument("--matching-instances", type=int, default=300)
    or_p.add_argument("--assignment-instances", type=int, default=200)
    or_p.add_argument("--seed", type=int, default=0)
    return parser


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if getattr(args, "scenario", None):
        cfg = apply_scenario(cfg, args.scenario)
    import dataclasses

    overrides = {}
    if getattr(args, "drops", None) is not None:
        overrides["num_drops"] = args.drops
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _cmd_run(args) -> int:
    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    for s in schemes:
        if s not in engine.SCHEMES:
            print(f"unknown scheme {s!r}; choose from {engine.SCHEMES}", file=sys.stderr)
            return 2
    progress = None if args.quiet else (lambda msg: print(msg, flush=True))
    campaign = engine.run_campaign(cfg, schemes, out_dir=args.out,
                                   progress=progress, workers=args.workers)
    for scheme in schemes:
        o = campaign.overall_gain(scheme)
        c = campaign.cellular_gain(scheme)
        print(f"[{scheme}] overall {engine._pct(o)}  cellular {engine._pct(c)}  "
              f"pairs/drop {campaign.mean_enabled_pairs(scheme):.1f}")
    print(f"outputs written to {args.out}/")
    return 0


def _cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print(f"OK: {args.config} (seed={cfg.seed}, drops={cfg.num_drops}, "
          f"micro={'on' if cfg.micro_enabled else 'off'})")
    return 0


def _cmd_trace(args) -> int:
    if args.out_of_coverage and args.topology != "single-cell":
        print("--out-of-coverage applies to the single-cell topology only",
              file=sys.stderr)
        return 2
    response_at = args.retries + 2 if args.outcome == "timeout" else 1
    if args.topology == "single-cell":
        trace = signaling.run_single_cell(
            args.outcome == "accepted",
            discovery_model=args.model,
            response_on_attempt=response_at,
            max_retries=args.retries,
            discoveree_covered=not args.out_of_coverage,
        )
    else:
        trace = signaling.run_multi_cell(
            args.outcome == "accepted",
            True,
            discovery_model=args.model,
            response_on_attempt=response_at,
            max_retries=args.retries,
        )
    text = trace.to_text()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"trace written to {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    ok = True

    mismatches = 0
    for _ in range(args.matching_instances):
        n = int(rng.integers(0, 7))
        m = int(rng.integers(0, 7))
        adj = rng.random((n, m)) < rng.uniform(0.1, 0.9)
        if rrm.max_matching_size(adj) != rrm.brute_force_max_matching(adj):
            mismatches += 1
    line = "PASS" if mismatches == 0 else f"FAIL ({mismatches} mismatches)"
    print(f"matching oracle [{args.matching_instances} instances]: {line}")
    ok &= mismatches == 0

    mismatches = 0
    for _ in range(args.assignment_instances):
        score = rng.uniform(0.0, 8.0, size=(5, 5))
        _, total = rrm.max_total_assignment(score)
        best = max(sum(score[i, p[i]] for i in range(5))
                   for p in itertools.permutations(range(5)))
        if abs(total - best) > 1e-9:
            mismatches += 1
    line = "PASS" if mismatches == 0 else f"FAIL ({mismatches} mismatches)"
    print(f"assignment oracle [{args.assignment_instances} instances]: {line}")
    ok &= mismatches == 0
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "validate-config": _cmd_validate,
        "trace-protocol": _cmd_trace,
        "oracle": _cmd_oracle,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
