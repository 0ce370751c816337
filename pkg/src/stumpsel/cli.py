"""The ``bench`` command line interface.

Subcommands:

* ``bench run --config cfg.json --out results.csv`` - full (method, s) sweep.
* ``bench min-n --method NAME --p P --s S [...]``   - one minimal-n search.
* ``bench score --data data.csv --strategy median|optimal [--unknown-s]``
  - ad-hoc stump scoring of a user CSV (features in the leading columns,
  response last, header row required).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .harness import (
    CSV_HEADER,
    ExperimentConfig,
    ExperimentRow,
    UnreachableTargetError,
    _search_min_samples,
    canonical_method,
    model_for,
    run_experiment,
    search_seed,
)
from .permutation import recover_unknown_s
from .rng import DOMAIN_BASE_SCORE, child_seed
from .stump import Dataset, SplitStrategy, score_all


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Decision-stump feature selection benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a full sweep from a JSON config")
    run.add_argument("--config", required=True, help="JSON config path")
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--workers", type=int, default=1, help="replication threads")
    run.add_argument(
        "--granularity",
        type=float,
        default=0.0,
        help="relative bisection stop width (0 = down to single samples)",
    )

    minn = sub.add_parser("min-n", help="minimal sample count for one (method, s)")
    minn.add_argument("--method", required=True)
    minn.add_argument("--p", type=int, required=True)
    minn.add_argument("--s", type=int, required=True)
    minn.add_argument(
        "--design",
        default="uniform01",
        choices=["uniform01", "uniformsym", "gaussian"],
    )
    minn.add_argument("--noise-sd", type=float, default=0.1)
    minn.add_argument("--target", type=float, default=0.95)
    minn.add_argument("--reps", type=int, default=25)
    minn.add_argument("--seed", type=int, default=0)
    minn.add_argument("--n-lo", type=int, default=0, help="0 means s + 1")
    minn.add_argument("--n-hi", type=int, default=0, help="0 means auto")
    minn.add_argument("--beta-min", type=float, default=0.5)
    minn.add_argument("--beta-max", type=float, default=1.5)
    minn.add_argument("--workers", type=int, default=1)
    minn.add_argument("--granularity", type=float, default=0.0)

    score = sub.add_parser("score", help="score the features of a CSV dataset")
    score.add_argument("--data", required=True, help="CSV: feature columns + response")
    score.add_argument("--strategy", required=True, choices=["median", "optimal"])
    score.add_argument("--unknown-s", action="store_true")
    score.add_argument("--t-rounds", type=int, default=10)
    score.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    run_experiment(
        config, args.out, workers=args.workers, granularity=args.granularity
    )
    return 0


def _cmd_min_n(args) -> int:
    config = ExperimentConfig(
        method=canonical_method(args.method),
        p=args.p,
        s_values=(args.s,),
        design=args.design,
        noise_sd=args.noise_sd,
        target_fraction=args.target,
        replications=args.reps,
        seed=args.seed,
        n_bracket=(args.n_lo, args.n_hi),
        beta_range=(args.beta_min, args.beta_max),
    )
    spec = model_for(config, args.s)
    started = time.perf_counter()
    n_star, probes = _search_min_samples(
        config.method[0],
        spec,
        config.target_fraction,
        config.replications,
        config.n_bracket,
        search_seed(config, args.s),
        workers=args.workers,
        granularity=args.granularity,
    )
    wall_ms = int(round((time.perf_counter() - started) * 1000))
    row = ExperimentRow(
        method=config.method[0],
        p=config.p,
        s=args.s,
        n_star=n_star,
        achieved_fraction=float(format(probes[n_star], ".6g")),
        replications=config.replications,
        seed=config.seed,
        wall_time_ms=wall_ms,
    )
    print(CSV_HEADER)
    print(row.to_csv())
    return 0


def _load_csv_dataset(path: str) -> tuple[Dataset, list[str]]:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2:
        raise ValueError(f"{path}: need a header row and at least 2 data rows")
    header = [name.strip() for name in lines[0].split(",")]
    if len(header) < 2:
        raise ValueError(f"{path}: need at least one feature column and a response")
    try:
        values = np.array(
            [[float(v) for v in line.split(",")] for line in lines[1:] if line],
            dtype=np.float64,
        )
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric cell ({exc})") from exc
    if values.ndim != 2 or values.shape[1] != len(header):
        raise ValueError(f"{path}: ragged rows")
    return Dataset(x=values[:, :-1], y=values[:, -1]), header[:-1]


def _cmd_score(args) -> int:
    data, names = _load_csv_dataset(args.data)
    strategy = SplitStrategy(args.strategy)
    if args.unknown_s:
        result = recover_unknown_s(data, args.t_rounds, strategy, args.seed)
        imp = result.imp
        selected = result.selected
        print(f"gamma={result.gamma:.6g}", file=sys.stderr)
    else:
        imp = score_all(data, strategy, child_seed(args.seed, DOMAIN_BASE_SCORE)).imp
        selected = None
    ranking = np.argsort(imp, kind="stable")
    header = "feature,impurity,rank"
    if selected is not None:
        header += ",selected"
    print(header)
    for rank, k in enumerate(ranking, start=1):
        line = f"{names[k]},{imp[k]:.6g},{rank}"
        if selected is not None:
            line += f",{int(int(k) in selected)}"
        print(line)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "min-n":
            return _cmd_min_n(args)
        return _cmd_score(args)
    except UnreachableTargetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
