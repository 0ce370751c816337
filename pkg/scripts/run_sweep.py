#!/usr/bin/env python3
"""Run the desk-scale sample-complexity sweeps and print a summary table.

Writes results/<config-name>.csv for each config given (defaults to the two
shipped configs) and reports the fitted log-log slope of n* versus s per
method.  Pass --quick for a cheap smoke-scale run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from stumpsel import ExperimentConfig, run_experiment

REPO = Path(__file__).resolve().parent.parent


def summarize(rows) -> None:
    methods = sorted({row.method for row in rows})
    for method in methods:
        mine = [(row.s, row.n_star) for row in rows if row.method == method]
        mine.sort()
        s_vals = np.array([s for s, _ in mine], dtype=float)
        n_vals = np.array([n for _, n in mine], dtype=float)
        slope = np.polyfit(np.log(s_vals), np.log(n_vals), 1)[0] if len(mine) > 1 else float("nan")
        pairs = "  ".join(f"s={s}: n*={n}" for s, n in mine)
        print(f"  {method:16s} slope={slope:5.2f}  {pairs}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "configs",
        nargs="*",
        default=[
            str(REPO / "configs" / "fig_uniform.json"),
            str(REPO / "configs" / "fig_gaussian.json"),
        ],
    )
    parser.add_argument("--out-dir", default=str(REPO / "results"))
    parser.add_argument("--workers", type=int, default=2)
    parser.add_argument(
        "--granularity",
        type=float,
        default=0.01,
        help="relative bisection stop width; 0 bisects to single samples",
    )
    parser.add_argument("--quick", action="store_true", help="3 replications, low p")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for config_path in args.configs:
        config = ExperimentConfig.from_json(config_path)
        if args.quick:
            config = ExperimentConfig(
                method=config.method,
                p=min(config.p, 40),
                s_values=tuple(s for s in config.s_values if s <= 8) or (2,),
                design=config.design,
                noise_sd=config.noise_sd,
                target_fraction=config.target_fraction,
                replications=3,
                seed=config.seed,
                n_bracket=(9, 256),
                beta_range=config.beta_range,
            )
        out = out_dir / (Path(config_path).stem + ".csv")
        print(f"{config_path} -> {out}")
        rows = run_experiment(
            config, out, workers=args.workers, granularity=args.granularity
        )
        summarize(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
