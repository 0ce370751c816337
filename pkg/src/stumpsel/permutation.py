"""Active-set recovery when the sparsity level is unknown.

Row-permuting the design decouples every feature from the response, so the
smallest impurity over a few permuted rounds estimates where the inactive
features' impurities start.  Features at or below that threshold on the
original data are selected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import (
    DOMAIN_BASE_SCORE,
    DOMAIN_PERM_ROUND,
    DOMAIN_ROUND_SCORE,
    child_seed,
    substream,
)
from .stump import Dataset, SplitStrategy, score_all


@dataclass
class ThresholdResult:
    """Threshold estimate and the selection it induces."""

    gamma: float
    per_round_min: np.ndarray
    selected: set[int]
    imp: np.ndarray  # impurities of the unpermuted data, length p


def permute_rows(data: Dataset, rng: np.random.Generator) -> Dataset:
    """Uniformly permute the rows of x, leaving y untouched."""
    perm = rng.permutation(data.n)
    return Dataset(x=data.x[perm], y=data.y)


def _round_minima(
    data: Dataset, t_rounds: int, strategy: SplitStrategy, seed: int
) -> np.ndarray:
    if t_rounds < 2:
        raise ValueError(f"t_rounds must be >= 2, got {t_rounds}")
    minima = np.empty(t_rounds - 1, dtype=np.float64)
    for t in range(t_rounds - 1):
        permuted = permute_rows(data, substream(seed, DOMAIN_PERM_ROUND, t))
        scores = score_all(permuted, strategy, child_seed(seed, DOMAIN_ROUND_SCORE, t))
        minima[t] = scores.imp.min()
    return minima


def estimate_threshold(
    data: Dataset, t_rounds: int, strategy: SplitStrategy, seed: int
) -> float:
    """Minimum impurity over t_rounds - 1 independently permuted rounds."""
    return float(_round_minima(data, t_rounds, strategy, seed).min())


def recover_unknown_s(
    data: Dataset, t_rounds: int, strategy: SplitStrategy, seed: int
) -> ThresholdResult:
    """Select every feature whose impurity is at most the permutation threshold.

    Ties at the threshold are included; selection is therefore downward
    closed in the impurity ranking.
    """
    scores = score_all(data, strategy, child_seed(seed, DOMAIN_BASE_SCORE))
    per_round = _round_minima(data, t_rounds, strategy, seed)
    gamma = float(per_round.min())
    selected = {int(k) for k in np.flatnonzero(scores.imp <= gamma)}
    return ThresholdResult(
        gamma=gamma, per_round_min=per_round, selected=selected, imp=scores.imp
    )
