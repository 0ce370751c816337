"""Decision-stump impurity scoring and top-s feature selection.

A stump on feature k sorts the samples by that column, splits them into a
left and a right group, and scores the feature by the weighted sum of the
output variances of the two groups.  Low impurity means the feature explains
much of the response on its own.  Three split strategies are supported:

* ``MEDIAN``    - split at ``n // 2``.
* ``OPTIMAL``   - split wherever the impurity is minimal.
* ``LEFT_ONLY`` - ablation: score by the left half's variance alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .rng import DOMAIN_TIEBREAK, check_seed, substream, tie_break_keys

# Column-chunk size for the vectorized kernels, in matrix elements; bounds
# temporary memory to a few hundred MB at float64.
_CHUNK_ELEMS = 1 << 25


class SplitStrategy(Enum):
    """Split-point rule used when scoring a feature."""

    MEDIAN = "median"
    OPTIMAL = "optimal"
    LEFT_ONLY = "left_only"


@dataclass
class Dataset:
    """An n x p design matrix with its length-n response vector.

    Arrays are converted to float64 but not copied when already in that
    layout; treat them as read-only.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError(f"x must be 2-D, got shape {x.shape}")
        if y.ndim != 1:
            raise ValueError(f"y must be 1-D, got shape {y.shape}")
        n, p = x.shape
        if n < 2:
            raise ValueError(f"need at least 2 samples, got {n}")
        if p < 1:
            raise ValueError("need at least 1 feature")
        if y.shape[0] != n:
            raise ValueError(f"x has {n} rows but y has {y.shape[0]}")
        if not np.isfinite(x).all() or not np.isfinite(y).all():
            raise ValueError("dataset entries must all be finite")
        self.x = x
        self.y = y

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass
class ImpurityScores:
    """Per-feature impurities and the induced ascending ranking."""

    imp: np.ndarray
    ranking: np.ndarray

    def __post_init__(self):
        imp = np.asarray(self.imp, dtype=np.float64)
        ranking = np.asarray(self.ranking, dtype=np.int64)
        if imp.ndim != 1 or ranking.shape != imp.shape:
            raise ValueError("imp and ranking must be 1-D with equal length")
        self.imp = imp
        self.ranking = ranking


def sorted_order(column: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Argsort of one column with ties broken by fresh 64-bit random keys.

    The returned permutation sorts ``column`` ascending; equal values are
    ordered by per-row keys drawn from ``rng``, so the order is reproducible
    under the same stream regardless of how ties occur.
    """
    col = np.asarray(column, dtype=np.float64)
    if col.ndim != 1:
        raise ValueError(f"column must be 1-D, got shape {col.shape}")
    if not np.isfinite(col).all():
        raise ValueError("column has non-finite entries")
    keys = rng.integers(0, 1 << 64, size=col.shape[0], dtype=np.uint64, endpoint=False)
    return np.lexsort((keys, col))


def _check_split(n: int, n_left: int) -> None:
    if not 1 <= n_left <= n - 1:
        raise ValueError(f"n_left must be in [1, {n - 1}], got {n_left}")


def split_impurity(y_sorted: np.ndarray, n_left: int) -> float:
    """Weighted child variances of the split after ``n_left`` samples.

    This is the direct evaluation of the impurity definition and serves as
    the reference against which the prefix-sum scan is checked.
    """
    y = np.asarray(y_sorted, dtype=np.float64)
    n = y.shape[0]
    _check_split(n, n_left)
    n_right = n - n_left
    return float(
        (n_left / n) * y[:n_left].var() + (n_right / n) * y[n_left:].var()
    )


def split_impurity_via_identity(y_sorted: np.ndarray, n_left: int) -> float:
    """Same split scored as total variance minus the squared child-mean gap."""
    y = np.asarray(y_sorted, dtype=np.float64)
    n = y.shape[0]
    _check_split(n, n_left)
    n_right = n - n_left
    gap = y[:n_left].mean() - y[n_left:].mean()
    return float(y.var() - (n_left * n_right) / (n * n) * gap * gap)


def _optimal_from_sorted(y_sorted: np.ndarray) -> float:
    """Minimum impurity over all splits in O(n) via centered prefix sums."""
    y = np.asarray(y_sorted, dtype=np.float64)
    n = y.shape[0]
    yc = y - y.mean()
    c = np.cumsum(yc)
    total = c[-1]
    var_y = float(np.mean(yc * yc) - (total / n) ** 2)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    gap = c[:-1] / n_left - (total - c[:-1]) / n_right
    best = float(np.max((n_left * n_right) * gap * gap)) / (n * n)
    return max(var_y - best, 0.0)


def feature_impurity(
    column: np.ndarray,
    y: np.ndarray,
    strategy: SplitStrategy,
    rng: np.random.Generator,
) -> float:
    """Impurity of a single feature under the given split strategy."""
    col = np.asarray(column, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if col.shape != yv.shape or col.ndim != 1:
        raise ValueError(
            f"column and y must be 1-D with equal length, got {col.shape} and {yv.shape}"
        )
    n = col.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if not np.isfinite(yv).all():
        raise ValueError("y has non-finite entries")
    ys = yv[sorted_order(col, rng)]
    if strategy is SplitStrategy.MEDIAN:
        return split_impurity(ys, n // 2)
    if strategy is SplitStrategy.OPTIMAL:
        return _optimal_from_sorted(ys)
    m = n // 2
    return float(ys[:m].var())


def _column_chunks(n: int, p: int):
    """Yield (start, stop) column slices keeping n*width under the budget."""
    width = max(1, min(p, _CHUNK_ELEMS // max(1, n)))
    for start in range(0, p, width):
        yield start, min(start + width, p)


def _half_split_scores(
    x: np.ndarray, yc: np.ndarray, seed: int, strategy: SplitStrategy
) -> np.ndarray:
    """Vectorized median / left-only impurities for every column.

    Only the membership of the lower half matters for these strategies, so
    the kernel partitions each column around its n//2-th order statistic
    instead of sorting.  Rows tied with that boundary value are admitted in
    ascending tie-key order, which matches what sorting by (value, key)
    would select.
    """
    n, p = x.shape
    m = n // 2
    n_right = n - m
    yc2 = yc * yc
    y_stack = np.vstack((yc, yc2))  # one bool->float pass per matmul below
    total_sum = float(yc.sum())
    total_sq = float(yc2.sum())
    imp = np.empty(p, dtype=np.float64)

    for start, stop in _column_chunks(n, p):
        # column-major copy: the partition and comparisons walk columns
        xb = np.asfortranarray(x[:, start:stop])
        boundary = np.partition(xb, m - 1, axis=0)[m - 1]
        lt = xb < boundary
        eq = xb == boundary
        count_lt = lt.sum(axis=0)
        count_eq = eq.sum(axis=0)
        need = m - count_lt  # rows to admit from the tied set, in [1, count_eq]

        sums = y_stack @ lt
        s_left, q_left = sums[0], sums[1]

        simple = (need == 1) & (count_eq == 1)
        if simple.all():  # unique boundary value: admit exactly that row
            idx = eq.argmax(axis=0)
            s_left += yc[idx]
            q_left += yc2[idx]
        else:
            eq_sums = y_stack @ eq
            whole = need == count_eq
            s_left = np.where(whole, s_left + eq_sums[0], s_left)
            q_left = np.where(whole, q_left + eq_sums[1], q_left)
            for j in np.flatnonzero(~whole):
                rows = np.flatnonzero(eq[:, j])
                keys = tie_break_keys(seed, start + j, n)
                picked = rows[np.argsort(keys[rows], kind="stable")[: need[j]]]
                s_left[j] += yc[picked].sum()
                q_left[j] += yc2[picked].sum()

        mean_l = s_left / m
        var_l = np.maximum(q_left / m - mean_l * mean_l, 0.0)
        if strategy is SplitStrategy.LEFT_ONLY:
            imp[start:stop] = var_l
            continue
        mean_r = (total_sum - s_left) / n_right
        var_r = np.maximum((total_sq - q_left) / n_right - mean_r * mean_r, 0.0)
        imp[start:stop] = (m / n) * var_l + (n_right / n) * var_r

    return imp


def _optimal_scores(x: np.ndarray, yc: np.ndarray, seed: int) -> np.ndarray:
    """Vectorized optimal-split impurities for every column."""
    n, p = x.shape
    var_y = float(np.mean(yc * yc) - (yc.sum() / n) ** 2)
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    weight = n_left * n_right
    imp = np.empty(p, dtype=np.float64)

    for start, stop in _column_chunks(n, p):
        xb = x[:, start:stop]
        order = np.argsort(xb, axis=0, kind="stable")
        xs = np.take_along_axis(xb, order, axis=0)
        dup = (xs[1:] == xs[:-1]).any(axis=0)
        for j in np.flatnonzero(dup):
            keys = tie_break_keys(seed, start + j, n)
            order[:, j] = np.lexsort((keys, xb[:, j]))
        ys = yc[order]
        c = np.cumsum(ys, axis=0)
        total = c[-1]
        gap = c[:-1] / n_left - (total - c[:-1]) / n_right
        best = (weight * gap * gap).max(axis=0) / (n * n)
        imp[start:stop] = np.maximum(var_y - best, 0.0)

    return imp


def score_all(data: Dataset, strategy: SplitStrategy, seed: int) -> ImpurityScores:
    """Score every feature and rank them by ascending impurity.

    Tie keys for feature k come from the substream at (seed, k), so the
    result is independent of evaluation order; ranking ties break toward
    the lower feature index.
    """
    check_seed(seed)
    yc = data.y - data.y.mean()
    if strategy is SplitStrategy.OPTIMAL:
        imp = _optimal_scores(data.x, yc, seed)
    else:
        imp = _half_split_scores(data.x, yc, seed, strategy)
    ranking = np.argsort(imp, kind="stable")
    return ImpurityScores(imp=imp, ranking=ranking)


def feature_rng(seed: int, feature: int) -> np.random.Generator:
    """The per-feature substream that ``score_all`` draws tie keys from."""
    return substream(seed, DOMAIN_TIEBREAK, feature)


def select_top(scores: ImpurityScores, s: int) -> set[int]:
    """The s features with smallest impurity."""
    p = scores.ranking.shape[0]
    if not 1 <= s <= p:
        raise ValueError(f"s must be in [1, {p}], got {s}")
    return {int(k) for k in scores.ranking[:s]}
