#!/usr/bin/env python3
"""Reproduce the three headline campaigns and print a gain summary table.

Runs the macro-only scheme-1, macro-only scheme-2 and hetnet presets over the
same base config (paired drops: identical seeds everywhere), writes per-run
CSV outputs under --out, and prints overall/cellular gains per scheme plus
the per-layer split for the hetnet run.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from d2dsim.config import ScenarioConfig, apply_scenario, load_config  # noqa: E402
from d2dsim.engine import run_campaign  # noqa: E402


def pct(x: float | None) -> str:
    return "n/a" if x is None else f"{100.0 * x:+7.2f}%"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="base JSON config (defaults otherwise)")
    ap.add_argument("--drops", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", default="out/experiments")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--schemes", default="proposed,capacity-max,random",
                    help="comma-separated scheme list (none is always added)")
    args = ap.parse_args()

    import dataclasses

    base = load_config(args.config) if args.config else ScenarioConfig()
    overrides = {}
    if args.drops is not None:
        overrides["num_drops"] = args.drops
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        base = dataclasses.replace(base, **overrides)
    schemes = tuple(dict.fromkeys(
        [s.strip() for s in args.schemes.split(",") if s.strip()] + ["none"]))

    for scenario in ("macro-scheme1", "macro-scheme2", "hetnet"):
        cfg = apply_scenario(base, scenario)
        t0 = time.time()
        res = run_campaign(cfg, schemes, out_dir=os.path.join(args.out, scenario),
                           workers=args.workers)
        dt = time.time() - t0
        print(f"\n== {scenario} ({cfg.num_drops} drops, seed {cfg.seed}, {dt:.0f}s) ==")
        for s in schemes:
            if s == "none":
                continue
            line = (f"  {s:<13} overall {pct(res.overall_gain(s))}   "
                    f"cellular {pct(res.cellular_gain(s))}   "
                    f"pairs/drop {res.mean_enabled_pairs(s):5.1f}")
            if scenario == "hetnet":
                line += (f"   macro {pct(res.kind_overall_gain(s, 'macro'))}"
                         f"   micro {pct(res.kind_overall_gain(s, 'micro'))}")
            print(line)
    print(f"\nCSV outputs under {args.out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
