"""Sample-complexity benchmark harness.

For each (method, sparsity) pair the harness searches for the smallest
sample count whose mean recovery fraction reaches the target, writing one
CSV row per pair.  All replication randomness is derived from the config
seed, and the same replication substreams are reused at every probed n
(common random numbers), which keeps the bisection well-behaved.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import lasso_rank, sis_rank
from .rng import (
    DOMAIN_DATASET,
    DOMAIN_METHOD,
    DOMAIN_MODEL,
    check_seed,
    child_seed,
    substream,
)
from .stump import Dataset, SplitStrategy, score_all
from .synth import DesignDistribution, ModelSpec, gen_dataset, gen_model

EXPANSION_CAP = 1 << 20  # bracket auto-expansion gives up past this n

CSV_HEADER = "method,p,s,n_star,achieved_fraction,replications,seed,wall_time_ms"


class UnreachableTargetError(RuntimeError):
    """The target fraction stayed out of reach even at the expansion cap."""


def _stump_ranker(strategy: SplitStrategy):
    def rank(data: Dataset, seed: int) -> np.ndarray:
        return score_all(data, strategy, seed).ranking

    return rank


def _lasso_ranker(data: Dataset, seed: int) -> np.ndarray:
    return lasso_rank(data, seed=seed)


def _sis_ranker(data: Dataset, seed: int) -> np.ndarray:
    return sis_rank(data)


METHODS = {
    "DStumpMedian": _stump_ranker(SplitStrategy.MEDIAN),
    "DStumpOptimal": _stump_ranker(SplitStrategy.OPTIMAL),
    "DStumpLeftOnly": _stump_ranker(SplitStrategy.LEFT_ONLY),
    "Lasso": _lasso_ranker,
    "SIS": _sis_ranker,
}


def canonical_method(name: str) -> str:
    for known in METHODS:
        if known.lower() == name.lower():
            return known
    raise ValueError(f"unknown method {name!r}; choose from {sorted(METHODS)}")


def rank_features(method: str, data: Dataset, seed: int) -> np.ndarray:
    """Feature ranking (best first) for any registered method."""
    return METHODS[canonical_method(method)](data, seed)


def _replication_fraction(
    method: str, spec: ModelSpec, n: int, r: int, seed: int
) -> float:
    data = gen_dataset(spec, n, substream(seed, DOMAIN_DATASET, r))
    ranking = rank_features(method, data, child_seed(seed, DOMAIN_METHOD, r))
    active = set(spec.active)
    hits = sum(1 for k in ranking[: spec.s] if int(k) in active)
    return hits / spec.s


def _check_recovery_args(spec: ModelSpec, n: int, replications: int) -> None:
    if spec.s < 1:
        raise ValueError("recovery fraction needs a model with s >= 1")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if replications < 1:
        raise ValueError("replications must be >= 1")


def recovery_fraction(
    method: str,
    spec: ModelSpec,
    n: int,
    replications: int,
    seed: int,
    workers: int = 1,
) -> float:
    """Mean fraction of the active set found in the top-s ranks.

    Each replication draws a fresh dataset from its own substream of
    ``seed``; results are identical for any worker count.
    """
    method = canonical_method(method)
    _check_recovery_args(spec, n, replications)
    if workers <= 1:
        fractions = [
            _replication_fraction(method, spec, n, r, seed)
            for r in range(replications)
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fractions = list(
                pool.map(
                    lambda r: _replication_fraction(method, spec, n, r, seed),
                    range(replications),
                )
            )
    return float(np.mean(fractions))


def _probe_passes(
    method: str,
    spec: ModelSpec,
    n: int,
    replications: int,
    seed: int,
    target: float,
    workers: int,
) -> tuple[bool, float | None]:
    """Decide ``mean fraction >= target`` with an exact early-fail shortcut.

    Replications run in their usual order, but the probe stops as soon as
    even all-perfect remaining replications could not lift the mean to the
    target.  The decision matches the full evaluation exactly; the returned
    fraction is only present (and complete) when the probe passes.
    """
    fractions: list[float] = []
    batch = max(1, workers)
    while len(fractions) < replications:
        rounds = range(len(fractions), min(len(fractions) + batch, replications))
        if workers <= 1:
            fractions += [
                _replication_fraction(method, spec, n, r, seed) for r in rounds
            ]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                fractions += list(
                    pool.map(
                        lambda r: _replication_fraction(method, spec, n, r, seed),
                        rounds,
                    )
                )
        best_possible = (sum(fractions) + (replications - len(fractions))) / replications
        if best_possible < target:
            return False, None
    fraction = float(np.mean(fractions))  # same reduction as recovery_fraction
    return fraction >= target, fraction


def _search_min_samples(
    method: str,
    spec: ModelSpec,
    target_fraction: float,
    replications: int,
    n_bracket: tuple[int, int],
    seed: int,
    workers: int = 1,
    granularity: float = 0.0,
) -> tuple[int, dict[int, float | None]]:
    """Bisection for the smallest passing n; returns (n_star, probed results).

    The same replication substreams back every probe (common random
    numbers).  ``granularity`` optionally stops the bisection once the
    bracket width falls below that fraction of the current upper end; 0
    bisects all the way down to single samples.  Probes that fail may stop
    early, in which case their cached fraction is None; passing probes are
    always evaluated in full.
    """
    method = canonical_method(method)
    if not 0.0 <= target_fraction <= 1.0:
        raise ValueError("target_fraction must be in [0, 1]")
    if granularity < 0.0:
        raise ValueError("granularity must be >= 0")
    lo, hi = int(n_bracket[0]), int(n_bracket[1])
    if not 2 <= lo < hi:
        raise ValueError(f"need 2 <= n_lo < n_hi, got {n_bracket}")

    probes: dict[int, float | None] = {}
    passed: dict[int, bool] = {}

    def probe(n: int) -> bool:
        if n not in passed:
            ok, fraction = _probe_passes(
                method, spec, n, replications, seed, target_fraction, workers
            )
            passed[n] = ok
            probes[n] = fraction
        return passed[n]

    while not probe(hi):
        if hi >= EXPANSION_CAP:
            raise UnreachableTargetError(
                f"{method}: target {target_fraction} still unreached at n={hi} "
                "(expansion cap reached)"
            )
        lo, hi = hi + 1, min(hi * 2, EXPANSION_CAP)

    while lo < hi and hi - lo > granularity * hi:
        mid = (lo + hi) // 2
        if probe(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi, probes


def min_samples(
    method: str,
    spec: ModelSpec,
    target_fraction: float,
    replications: int,
    n_bracket: tuple[int, int],
    seed: int,
    workers: int = 1,
    granularity: float = 0.0,
) -> int:
    """Smallest n in the (auto-expanded) bracket reaching the target fraction."""
    n_star, _ = _search_min_samples(
        method,
        spec,
        target_fraction,
        replications,
        n_bracket,
        seed,
        workers,
        granularity,
    )
    return n_star


_DESIGN_TOKENS = {
    "uniform01": DesignDistribution.UNIFORM01,
    "uniformsym": DesignDistribution.UNIFORM_SYM,
    "gaussian": DesignDistribution.STD_GAUSSIAN,
}


def parse_design(token: str) -> DesignDistribution:
    try:
        return _DESIGN_TOKENS[token.lower()]
    except KeyError:
        raise ValueError(
            f"unknown design {token!r}; choose from {sorted(_DESIGN_TOKENS)}"
        ) from None


@dataclass
class ExperimentConfig:
    """Input record for one harness run; mirrors the JSON config layout."""

    method: tuple[str, ...]
    p: int
    s_values: tuple[int, ...]
    design: DesignDistribution
    noise_sd: float = 0.1
    target_fraction: float = 0.95
    replications: int = 25
    seed: int = 0
    n_bracket: tuple[int, int] = (0, 0)
    beta_range: tuple[float, float] = (0.5, 1.5)

    def __post_init__(self):
        if isinstance(self.method, str):
            self.method = (self.method,)
        self.method = tuple(canonical_method(m) for m in self.method)
        if not self.method:
            raise ValueError("need at least one method")
        self.p = int(self.p)
        if self.p < 1:
            raise ValueError("p must be >= 1")
        self.s_values = tuple(int(s) for s in self.s_values)
        if not self.s_values:
            raise ValueError("need at least one sparsity level")
        if any(not 1 <= s <= self.p for s in self.s_values):
            raise ValueError("every s must be in [1, p]")
        if isinstance(self.design, str):
            self.design = parse_design(self.design)
        lo, hi = (int(v) for v in self.n_bracket)
        if lo == 0:  # default: just above the largest sparsity
            lo = max(self.s_values) + 1
        if hi == 0:
            hi = max(4 * lo, 256)
        self.n_bracket = (lo, hi)
        if lo < max(self.s_values) + 1:
            raise ValueError("n_bracket low end must be at least max(s) + 1")
        if not lo < hi:
            raise ValueError("n_bracket must satisfy n_lo < n_hi")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0.0 < self.target_fraction <= 1.0:
            raise ValueError("target_fraction must be in (0, 1]")
        bmin, bmax = (float(v) for v in self.beta_range)
        if not 0 < bmin <= bmax:
            raise ValueError("beta_range must satisfy 0 < beta_min <= beta_max")
        self.beta_range = (bmin, bmax)
        self.noise_sd = float(self.noise_sd)
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        self.seed = check_seed(self.seed)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            payload = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ValueError(f"cannot read config {path}: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        extra = set(payload) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        missing = {"method", "p", "s_values", "design"} - set(payload)
        if missing:
            raise ValueError(f"config is missing keys: {sorted(missing)}")
        return cls(**payload)

    def to_dict(self) -> dict:
        return {
            "method": list(self.method),
            "p": self.p,
            "s_values": list(self.s_values),
            "design": self.design.value,
            "noise_sd": self.noise_sd,
            "target_fraction": self.target_fraction,
            "replications": self.replications,
            "seed": self.seed,
            "n_bracket": list(self.n_bracket),
            "beta_range": list(self.beta_range),
        }


@dataclass
class ExperimentRow:
    """One CSV row: the minimal passing n for a (method, s) pair."""

    method: str
    p: int
    s: int
    n_star: int
    achieved_fraction: float
    replications: int
    seed: int
    wall_time_ms: int

    def to_csv(self) -> str:
        return ",".join(
            (
                self.method,
                str(self.p),
                str(self.s),
                str(self.n_star),
                format(self.achieved_fraction, ".6g"),
                str(self.replications),
                str(self.seed),
                str(self.wall_time_ms),
            )
        )

    @classmethod
    def from_csv(cls, line: str) -> "ExperimentRow":
        parts = line.strip().split(",")
        if len(parts) != 8:
            raise ValueError(f"expected 8 CSV fields, got {len(parts)}")
        return cls(
            method=parts[0],
            p=int(parts[1]),
            s=int(parts[2]),
            n_star=int(parts[3]),
            achieved_fraction=float(parts[4]),
            replications=int(parts[5]),
            seed=int(parts[6]),
            wall_time_ms=int(parts[7]),
        )


def model_for(config: ExperimentConfig, s: int) -> ModelSpec:
    """The model instance shared by every method at sparsity s."""
    return gen_model(
        config.p,
        s,
        config.beta_range[0],
        config.beta_range[1],
        config.design,
        config.noise_sd,
        substream(config.seed, DOMAIN_MODEL, s),
    )


def search_seed(config: ExperimentConfig, s: int) -> int:
    """Replication seed shared by every method and probed n at sparsity s."""
    return child_seed(config.seed, DOMAIN_DATASET, s)


def run_experiment(
    config: ExperimentConfig,
    out_path: str | Path,
    workers: int = 1,
    granularity: float = 0.0,
) -> list[ExperimentRow]:
    """Run the full (method, s) sweep, streaming rows to ``out_path``.

    Rows are flushed as they complete so partial results survive a crash;
    a ``<out>.meta.json`` sidecar records the config and conventions.
    The achieved fraction is rounded to 6 significant digits when the row is
    built, so parsing the CSV reproduces the row exactly.
    """
    out_path = Path(out_path)
    rows: list[ExperimentRow] = []
    try:
        out = out_path.open("w")
    except OSError as exc:
        raise ValueError(f"cannot write {out_path}: {exc}") from exc
    with out:
        out.write(CSV_HEADER + "\n")
        out.flush()
        for method in config.method:
            for s in config.s_values:
                spec = model_for(config, s)
                started = time.perf_counter()
                n_star, probes = _search_min_samples(
                    method,
                    spec,
                    config.target_fraction,
                    config.replications,
                    config.n_bracket,
                    search_seed(config, s),
                    workers=workers,
                    granularity=granularity,
                )
                wall_ms = int(round((time.perf_counter() - started) * 1000))
                row = ExperimentRow(
                    method=method,
                    p=config.p,
                    s=s,
                    n_star=n_star,
                    achieved_fraction=float(format(probes[n_star], ".6g")),
                    replications=config.replications,
                    seed=config.seed,
                    wall_time_ms=wall_ms,
                )
                rows.append(row)
                out.write(row.to_csv() + "\n")
                out.flush()
    meta = {
        "config": config.to_dict(),
        "version": __version__,
        "recovery_metric": "|top-s ranks intersect active| / s, averaged over replications",
        "lasso_ranking": "descending |standardized coefficient| at the CV-selected "
        "penalty; zeros last, ties toward the lower feature index",
        "noise_convention": "noise_sd is the standard deviation of the additive "
        "Gaussian noise",
    }
    meta_path = out_path.with_name(out_path.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return rows


def read_rows(path: str | Path) -> list[ExperimentRow]:
    """Parse a harness CSV back into rows (header required)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} does not start with the harness CSV header")
    return [ExperimentRow.from_csv(line) for line in lines[1:] if line]
