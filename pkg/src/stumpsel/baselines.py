"""Comparator feature rankers: cross-validated Lasso and correlation screening.

Both expose the same interface as the stump scorer: a permutation of the
feature indices, best first, so the harness can compare methods by their
top-s prefix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import DOMAIN_FOLDS, substream
from .stump import Dataset

_PATH_FLOOR = 1e-3  # lambda path runs from lambda_max down to lambda_max * this


@dataclass
class LassoFit:
    """Result of one coordinate-descent solve.

    ``coefficients`` and ``intercept`` are on the original data scale;
    ``objective_path`` records the penalized objective after each sweep on
    the standardized problem.
    """

    coefficients: np.ndarray
    intercept: float
    lam: float
    n_iterations: int
    converged: bool
    objective_path: np.ndarray


def _standardize(data: Dataset):
    """Center/scale columns to zero mean, unit population variance."""
    mu = data.x.mean(axis=0)
    sd = data.x.std(axis=0)
    scale = np.where(sd > 0, sd, 1.0)
    xs = (data.x - mu) / scale
    y_mean = data.y.mean()
    yc = data.y - y_mean
    return xs, yc, mu, scale, sd, y_mean


def _cd_solve(G, c, yty, lam, tol, max_sweeps, beta=None):
    """Cyclic coordinate descent with soft-thresholding, covariance updates.

    After each full pass, iterates on the current support until stable, then
    re-checks all coordinates.  Returns (beta, sweeps, converged, objective
    per sweep); each full or support pass counts as one sweep.
    """
    p = c.shape[0]
    diag = np.ascontiguousarray(np.diag(G))
    if beta is None:
        beta = np.zeros(p)
    q = G @ beta if beta.any() else np.zeros(p)
    scratch = np.empty(p)
    objectives = []

    def sweep(indices) -> float:
        max_delta = 0.0
        for j in indices:
            gjj = diag[j]
            if gjj <= 0.0:
                continue
            b_old = beta[j]
            rho = c[j] - q[j] + gjj * b_old
            if rho > lam:
                new = (rho - lam) / gjj
            elif rho < -lam:
                new = (rho + lam) / gjj
            else:
                new = 0.0
            delta = new - b_old
            if delta != 0.0:
                np.multiply(G[j], delta, out=scratch)
                np.add(q, scratch, out=q)
                beta[j] = new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        objectives.append(
            0.5 * (yty - 2.0 * float(c @ beta) + float(beta @ q))
            + lam * float(np.abs(beta).sum())
        )
        return max_delta

    everything = range(p)
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        delta = sweep(everything)
        sweeps += 1
        if delta <= tol:
            converged = True
            break
        support = np.flatnonzero(beta)
        while sweeps < max_sweeps and support.size:
            if sweep(support) <= tol:
                sweeps += 1
                break
            sweeps += 1
    return beta, sweeps, converged, np.asarray(objectives)


def lambda_max(data: Dataset) -> float:
    """Smallest penalty for which the lasso solution is identically zero.

    Computed on the standardized scale the solver operates on.
    """
    xs, yc, *_ = _standardize(data)
    return float(np.abs(xs.T @ yc).max() / data.n)


def lasso_fit(
    data: Dataset, lam: float, tol: float = 1e-8, max_sweeps: int = 1000
) -> LassoFit:
    """Solve (1/2n)||y - Xb - b0||^2 + lam * ||b||_1 by coordinate descent.

    Columns are standardized internally; the returned coefficients are mapped
    back to the original scale.  Non-convergence within ``max_sweeps`` is
    reported through the ``converged`` flag, never an exception.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    xs, yc, mu, scale, sd, y_mean = _standardize(data)
    n = data.n
    G = (xs.T @ xs) / n
    c = (xs.T @ yc) / n
    yty = float(yc @ yc) / n
    beta, sweeps, converged, objectives = _cd_solve(G, c, yty, lam, tol, max_sweeps)
    coef = np.where(sd > 0, beta / scale, 0.0)
    intercept = float(y_mean - coef @ mu)
    return LassoFit(
        coefficients=coef,
        intercept=intercept,
        lam=float(lam),
        n_iterations=sweeps,
        converged=converged,
        objective_path=objectives,
    )


def _lambda_path(lam_max: float, n_lambdas: int) -> np.ndarray:
    if n_lambdas == 1:
        return np.array([lam_max])
    return np.geomspace(lam_max, lam_max * _PATH_FLOOR, n_lambdas)


def _path_betas(xs, yc, lams, tol, max_sweeps):
    """Warm-started standardized-scale solutions along a descending path."""
    n = xs.shape[0]
    G = (xs.T @ xs) / n
    c = (xs.T @ yc) / n
    yty = float(yc @ yc) / n
    betas = np.empty((lams.shape[0], xs.shape[1]))
    beta = np.zeros(xs.shape[1])
    for i, lam in enumerate(lams):
        beta, _, _, _ = _cd_solve(G, c, yty, lam, tol, max_sweeps, beta=beta)
        betas[i] = beta
    return betas


def lasso_rank(
    data: Dataset,
    n_lambdas: int = 30,
    n_folds: int = 5,
    seed: int = 0,
    tol: float = 1e-4,
    max_sweeps: int = 200,
) -> np.ndarray:
    """Rank features by |coefficient| at the cross-validated penalty.

    A geometric path from lambda_max down to lambda_max * 1e-3 is scored by
    k-fold mean squared error with deterministic fold assignment; the final
    ranking uses the standardized-scale coefficients at the winning penalty,
    zeros last, ties toward the lower index.
    """
    if n_folds < 2:
        raise ValueError("n_folds must be >= 2")
    if data.n < n_folds:
        raise ValueError(f"need at least {n_folds} samples for {n_folds}-fold CV")
    if n_lambdas < 1:
        raise ValueError("n_lambdas must be >= 1")
    n, p = data.n, data.p

    lam_hi = lambda_max(data)
    if lam_hi == 0.0:  # constant response: nothing to fit
        return np.arange(p, dtype=np.int64)
    lams = _lambda_path(lam_hi, n_lambdas)

    perm = substream(seed, DOMAIN_FOLDS).permutation(n)
    folds = np.array_split(perm, n_folds)
    sq_err = np.zeros(lams.shape[0])
    for held_out in folds:
        train = np.setdiff1d(perm, held_out, assume_unique=True)
        sub = Dataset(x=data.x[train], y=data.y[train])
        xs, yc, mu, scale, _, y_mean = _standardize(sub)
        betas = _path_betas(xs, yc, lams, tol, max_sweeps)
        x_val = (data.x[held_out] - mu) / scale
        preds = x_val @ betas.T + y_mean
        residual = preds - data.y[held_out][:, None]
        sq_err += (residual * residual).sum(axis=0)

    best = int(np.argmin(sq_err / n))  # first minimum: ties favor larger lambda
    xs, yc, *_ = _standardize(data)
    beta = _path_betas(xs, yc, lams[: best + 1], tol, max_sweeps)[-1]
    return np.lexsort((np.arange(p), -np.abs(beta)))


def sis_rank(data: Dataset) -> np.ndarray:
    """Rank features by |Pearson correlation with y|, ties toward lower index.

    Columns (or a response) without variance get correlation 0 and therefore
    sort to the back.
    """
    xc = data.x - data.x.mean(axis=0)
    yc = data.y - data.y.mean()
    sx = np.sqrt((xc * xc).mean(axis=0))
    sy = np.sqrt((yc * yc).mean())
    cov = (xc.T @ yc) / data.n
    denom = sx * sy
    corr = np.divide(cov, denom, out=np.zeros_like(cov), where=denom > 0)
    return np.lexsort((np.arange(data.p), -np.abs(corr)))
