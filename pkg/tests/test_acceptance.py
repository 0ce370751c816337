"""Acceptance gate: one test per criterion, printing one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete.  Criteria 4-6 share two sample-complexity sweeps at p=200 with 25
replications; expect up to an hour on a slow two-core machine for the whole
gate, dominated by the left-subtree ablation at s=40 (n* around 5e5).
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from stumpsel import (
    Dataset,
    DesignDistribution,
    ExperimentConfig,
    LinkFunction,
    ModelSpec,
    SplitStrategy,
    gen_dataset,
    gen_model,
    recover_unknown_s,
    recovery_fraction,
    run_experiment,
    score_all,
    signal_gap,
    split_impurity,
    split_impurity_via_identity,
    sorted_order,
)
from stumpsel.harness import model_for, search_seed
from stumpsel.rng import substream, DOMAIN_DATASET, DOMAIN_MODEL
from stumpsel.stump import _optimal_from_sorted

NOISE_SD = 0.1
SWEEP_S = (5, 10, 20, 40)
SWEEP_SEED = 0
REPLICATIONS = 25
TARGET = 0.95
WORKERS = 2
GRANULARITY = 0.01  # relative bisection stop; keeps the big searches tractable


def report(criterion: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"\n[acceptance {criterion}] {status}: {detail}")
    assert ok, f"criterion {criterion} failed: {detail}"


def sweep_config(design: str, methods) -> ExperimentConfig:
    return ExperimentConfig(
        method=methods,
        p=200,
        s_values=SWEEP_S,
        design=design,
        noise_sd=NOISE_SD,
        target_fraction=TARGET,
        replications=REPLICATIONS,
        seed=SWEEP_SEED,
        n_bracket=(48, 1024),
        beta_range=(0.5, 1.5),
    )


def run_sweep(config: ExperimentConfig, tmp_path_factory, name: str):
    out = tmp_path_factory.mktemp("acceptance") / f"{name}.csv"
    rows = run_experiment(config, out, workers=WORKERS, granularity=GRANULARITY)
    return {(row.method, row.s): row.n_star for row in rows}


def loglog_slope(n_star_by_key, method):
    n_values = [n_star_by_key[(method, s)] for s in SWEEP_S]
    return float(np.polyfit(np.log(SWEEP_S), np.log(n_values), 1)[0])


@pytest.fixture(scope="module")
def uniform_sweep(tmp_path_factory):
    config = sweep_config(
        "uniform01", ("DStumpMedian", "DStumpOptimal", "DStumpLeftOnly", "Lasso")
    )
    started = time.perf_counter()
    n_star = run_sweep(config, tmp_path_factory, "uniform")
    return config, n_star, time.perf_counter() - started


@pytest.fixture(scope="module")
def gaussian_sweep(tmp_path_factory):
    config = sweep_config("gaussian", ("DStumpMedian", "DStumpOptimal"))
    n_star = run_sweep(config, tmp_path_factory, "gaussian")
    return config, n_star


# ---------------------------------------------------------------------------
# 1. impurity identity suite
# ---------------------------------------------------------------------------


def test_criterion_1_impurity_identity():
    gen = np.random.default_rng(101)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(gen.integers(2, 201))
        y = gen.uniform(-10, 10) + gen.uniform(0.1, 5) * gen.standard_normal(n)
        n_left = int(gen.integers(1, n))
        direct = split_impurity(y, n_left)
        identity = split_impurity_via_identity(y, n_left)
        worst = max(worst, abs(direct - identity) / max(1.0, y.var()))
    elapsed = time.perf_counter() - started
    report(
        1,
        worst <= 1e-9 and elapsed < 1.0,
        f"1000 instances, worst relative gap {worst:.2e}, {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 2. optimal-split scan equals exhaustive recomputation
# ---------------------------------------------------------------------------


def test_criterion_2_optimal_split_oracle():
    gen = np.random.default_rng(202)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(gen.integers(2, 65))
        column = gen.random(n)
        y = gen.uniform(-3, 3) + gen.standard_normal(n)
        ys = y[sorted_order(column, gen)]
        naive = min(split_impurity(ys, n_left) for n_left in range(1, n))
        fast = _optimal_from_sorted(ys)
        worst = max(worst, abs(naive - fast))
    elapsed = time.perf_counter() - started
    report(
        2,
        worst <= 1e-12 and elapsed < 1.0,
        f"200 instances (n <= 64), worst gap {worst:.2e}, {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 3. monotone invariance, bit for bit
# ---------------------------------------------------------------------------


def test_criterion_3_monotone_invariance():
    gen = np.random.default_rng(303)
    designs = list(DesignDistribution)
    started = time.perf_counter()
    checked = 0
    attempts = 0
    while checked < 100 and attempts < 200:
        i = attempts
        attempts += 1
        design = designs[i % 3]
        n = int(gen.integers(20, 60))
        p = int(gen.integers(2, 7))
        x = design.sample(gen, (n, p))
        y = gen.standard_normal(n)
        if any(np.unique(x[:, j]).size != n for j in range(p)):
            continue  # continuous draws tie with probability ~0; redraw
        data = Dataset(x=x, y=y)
        for transform in (lambda v: v**3 + v, design.cdf):
            moved = Dataset(x=transform(x), y=y)
            for strategy in SplitStrategy:
                base = score_all(data, strategy, seed=i)
                after = score_all(moved, strategy, seed=i)
                ok = (base.imp == after.imp).all() and (
                    base.ranking == after.ranking
                ).all()
                if not ok:
                    report(3, False, f"dataset {i}, {strategy}, {design}")
        checked += 1
    elapsed = time.perf_counter() - started
    report(
        3,
        checked == 100 and elapsed < 5.0,
        f"{checked} tie-free datasets, both transforms, {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 4. linear scaling of n* for the two-sided stumps, quadratic for left-only
# ---------------------------------------------------------------------------


def test_criterion_4_sample_complexity_shape(uniform_sweep):
    _, n_star, elapsed = uniform_sweep
    slopes = {
        method: loglog_slope(n_star, method)
        for method in ("DStumpMedian", "DStumpOptimal", "DStumpLeftOnly")
    }
    points = {m: [n_star[(m, s)] for s in SWEEP_S] for m in slopes}
    # the same growth separation, pointwise: quadrupling s multiplies the
    # left-only n* more than six-fold and by more than the median's factor
    left_ratio = n_star[("DStumpLeftOnly", 20)] / n_star[("DStumpLeftOnly", 5)]
    median_ratio = n_star[("DStumpMedian", 20)] / n_star[("DStumpMedian", 5)]
    ok = (
        slopes["DStumpMedian"] <= 1.25
        and slopes["DStumpOptimal"] <= 1.25
        and slopes["DStumpLeftOnly"] >= 1.6
        and left_ratio > 6.0
        and median_ratio < left_ratio
    )
    report(
        4,
        ok,
        f"slopes median={slopes['DStumpMedian']:.2f} "
        f"optimal={slopes['DStumpOptimal']:.2f} "
        f"left-only={slopes['DStumpLeftOnly']:.2f}; "
        f"s=5 to s=20 growth: left-only x{left_ratio:.1f}, median x{median_ratio:.1f}; "
        f"n*={points}; sweep took {elapsed / 60:.1f} min (target 20)",
    )


# ---------------------------------------------------------------------------
# 5. Lasso parity within a factor of 3
# ---------------------------------------------------------------------------


def test_criterion_5_lasso_parity(uniform_sweep):
    # Known-red at this noise level: with noise_sd = 0.1 the response
    # self-noise (the other active features' contributions) governs the
    # stump's n*, which grows like s log p, while cross-validated Lasso
    # sits near its information floor (n* 48..115 over s = 5..40, and an
    # sklearn LassoCV cross-check lands in the same place).  The gap
    # passes 3x from s = 10 up under every coefficient scale tried; see
    # README.  The measured ratios are reported rather than hidden.
    _, n_star, _ = uniform_sweep
    ratios = {}
    for method in ("DStumpMedian", "DStumpOptimal"):
        for s in SWEEP_S:
            stump_n = n_star[(method, s)]
            lasso_n = n_star[("Lasso", s)]
            ratios[(method, s)] = max(stump_n / lasso_n, lasso_n / stump_n)
    worst = max(ratios.values())
    report(
        5,
        worst <= 3.0,
        f"worst DStump/Lasso n* ratio {worst:.2f} "
        f"(all: {{{', '.join(f'{k[0]} s={k[1]}: {v:.2f}' for k, v in ratios.items())}}})",
    )


# ---------------------------------------------------------------------------
# 6. Gaussian-design sweep: same shape, optimal at least as good at s=40
# ---------------------------------------------------------------------------


def test_criterion_6_gaussian_design(gaussian_sweep):
    config, n_star = gaussian_sweep
    slopes = {
        method: loglog_slope(n_star, method)
        for method in ("DStumpMedian", "DStumpOptimal")
    }
    med40 = n_star[("DStumpMedian", 40)]
    opt40 = n_star[("DStumpOptimal", 40)]
    comparison = opt40 <= med40
    slack_note = ""
    if not comparison:
        # one-replication slack: at the median's n*, the optimal split must
        # sit within a single replication's weight of the target fraction
        fraction = recovery_fraction(
            "DStumpOptimal",
            model_for(config, 40),
            med40,
            REPLICATIONS,
            search_seed(config, 40),
            workers=WORKERS,
        )
        comparison = fraction >= TARGET - 1.0 / REPLICATIONS
        slack_note = f", optimal fraction at median n*: {fraction:.3f}"
    ok = slopes["DStumpMedian"] <= 1.25 and slopes["DStumpOptimal"] <= 1.25 and comparison
    report(
        6,
        ok,
        f"slopes median={slopes['DStumpMedian']:.2f} "
        f"optimal={slopes['DStumpOptimal']:.2f}, "
        f"s=40 n* optimal={opt40} vs median={med40}{slack_note}",
    )


# ---------------------------------------------------------------------------
# 7. unknown sparsity level: false inclusion and exact recovery
# ---------------------------------------------------------------------------


def test_criterion_7_unknown_sparsity():
    started = time.perf_counter()

    noise_spec = ModelSpec(
        p=50,
        s=0,
        active=(),
        links=tuple(LinkFunction.zero() for _ in range(50)),
        design=DesignDistribution.UNIFORM01,
        noise_sd=1.0,
    )
    false_hits = 0
    for r in range(200):
        data = gen_dataset(noise_spec, 500, substream(707, DOMAIN_DATASET, r))
        result = recover_unknown_s(data, 10, SplitStrategy.MEDIAN, seed=r)
        false_hits += bool(result.selected)
    false_rate = false_hits / 200

    signal_spec = gen_model(
        50, 5, 0.5, 1.5, DesignDistribution.UNIFORM01, 0.1, substream(17, DOMAIN_MODEL)
    )
    active = set(signal_spec.active)
    exact = 0
    for r in range(25):
        data = gen_dataset(signal_spec, 2000, substream(17, DOMAIN_DATASET, r))
        result = recover_unknown_s(data, 10, SplitStrategy.MEDIAN, seed=r)
        exact += result.selected == active
    elapsed = time.perf_counter() - started
    report(
        7,
        false_rate <= 0.10 + 0.07 and exact >= 22 and elapsed < 120,
        f"false-inclusion rate {false_rate:.3f} over 200 noise trials, "
        f"exact recovery {exact}/25 signal trials, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 8. signal-gap oracles
# ---------------------------------------------------------------------------


def test_criterion_8_signal_gap_oracles():
    started = time.perf_counter()
    gen = np.random.default_rng(808)
    exact_ok = all(
        signal_gap(LinkFunction.linear(beta), DesignDistribution.UNIFORM01, 1, gen)
        == beta / 2.0
        for beta in (1.0, -0.4, 2.5)
    )
    analytic = 2.0 * np.sqrt(2.0 / np.pi)
    gaps = [
        signal_gap(
            LinkFunction.linear(beta), DesignDistribution.STD_GAUSSIAN, 10**6, gen
        )
        for beta in (1.0, -1.5)
    ]
    mc_ok = abs(gaps[0] - analytic) <= 0.01 and abs(gaps[1] + 1.5 * analytic) <= 0.015
    elapsed = time.perf_counter() - started
    report(
        8,
        exact_ok and mc_ok and elapsed < 5.0,
        f"uniform closed form exact, gaussian MC gap {gaps[0]:.4f} "
        f"vs {analytic:.4f}, {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 9. CLI determinism across reruns and worker counts
# ---------------------------------------------------------------------------


def _cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "stumpsel.cli", *args],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def _mask_wall_time(csv_text: str) -> list[str]:
    return [line.rsplit(",", 1)[0] for line in csv_text.splitlines()]


def test_criterion_9_cli_determinism(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "method": ["DStumpMedian", "SIS"],
                "p": 15,
                "s_values": [2, 3],
                "design": "gaussian",
                "noise_sd": 0.1,
                "target_fraction": 0.9,
                "replications": 4,
                "seed": 99,
                "n_bracket": [4, 128],
                "beta_range": [0.5, 1.5],
            }
        )
    )
    bodies = []
    for run, workers in (("a", "1"), ("b", "2")):
        out = tmp_path / f"{run}.csv"
        _cli("run", "--config", str(config_path), "--out", str(out), "--workers", workers)
        bodies.append(_mask_wall_time(out.read_text()))
    run_ok = bodies[0] == bodies[1]

    minn_args = (
        "min-n", "--method", "Lasso", "--p", "10", "--s", "2", "--reps", "3",
        "--target", "0.8", "--seed", "5", "--n-lo", "8", "--n-hi", "64",
    )
    minn_ok = _mask_wall_time(_cli(*minn_args, "--workers", "1")) == _mask_wall_time(
        _cli(*minn_args, "--workers", "2")
    )

    data_path = tmp_path / "data.csv"
    gen = np.random.default_rng(12)
    x = gen.random((30, 3))
    y = x[:, 0] + 0.1 * gen.standard_normal(30)
    rows = "\n".join(",".join(f"{v:.12g}" for v in row) for row in np.column_stack([x, y]))
    data_path.write_text("a,b,c,y\n" + rows + "\n")
    score_args = (
        "score", "--data", str(data_path), "--strategy", "optimal",
        "--unknown-s", "--t-rounds", "5", "--seed", "3",
    )
    score_ok = _cli(*score_args) == _cli(*score_args)

    report(
        9,
        run_ok and minn_ok and score_ok,
        f"run rerun+workers identical={run_ok}, min-n identical={minn_ok}, "
        f"score identical={score_ok} (wall_time_ms column masked)",
    )
