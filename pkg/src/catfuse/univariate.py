"""Exact and grid-restricted minimisation of the single-variable fusion
objective

    0.5 * sum_k w_k (ybar_k - theta_k)^2  +  sum_k rho(theta_(k+1) - theta_(k))

where theta_(k) are the order statistics of theta and rho is the MCP.
The exact solver runs a dynamic program over piecewise-quadratic value
functions; the discrete solver restricts coefficients to a fixed grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .penalty import McpPenalty

__all__ = [
    "WeightedMeans",
    "UnivariateSolution",
    "collapse_to_subaverages",
    "objective_value",
    "solve_exact",
    "solve_discrete",
    "cluster_ids",
    "CLUSTER_TOL",
]

# Fitted values of fused levels are bit-identical after backtracking; the
# tolerance only guards float noise.
CLUSTER_TOL = 1e-8

# Slack on sum(w) <= 1 checks.
_WSUM_SLACK = 1e-12


@dataclass(frozen=True)
class WeightedMeans:
    """Sufficient statistics of the univariate problem.

    ``w[k]`` is the weight of level k (observation share n_k / n, or a
    working weight in GLM subproblems) and ``ybar[k]`` the response mean
    over that level.  Weights must be positive and sum to at most 1; sums
    strictly below 1 arise in weighted subproblems.
    """

    w: np.ndarray
    ybar: np.ndarray
    labels: list | None = None

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        object.__setattr__(self, "ybar", np.asarray(self.ybar, dtype=float))
        if self.w.ndim != 1 or self.w.shape != self.ybar.shape:
            raise ValueError("w and ybar must be 1-d arrays of equal length")
        if len(self.w) < 1:
            raise ValueError("need at least one level")
        if not np.all(np.isfinite(self.w)) or not np.all(np.isfinite(self.ybar)):
            raise ValueError("weights and subaverages must be finite")
        if np.any(self.w <= 0):
            raise ValueError("all weights must be positive")
        if self.w.sum() > 1.0 + _WSUM_SLACK:
            raise ValueError(f"weights sum to {self.w.sum()} > 1")
        if self.labels is not None and len(self.labels) != len(self.w):
            raise ValueError("labels length mismatch")

    @property
    def n_levels(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class UnivariateSolution:
    """Fitted coefficients in original level order, the objective value,
    and the fused-cluster id of each level (ids increase with value)."""

    theta: np.ndarray
    objective: float
    clusters: np.ndarray
    stage_pieces: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_clusters(self) -> int:
        return int(self.clusters.max()) + 1


def collapse_to_subaverages(y, x, n_levels: int) -> WeightedMeans:
    """Per-level weights and response means from raw observations.

    ``x`` holds level codes in 0..n_levels-1; every level must occur at
    least once.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x)
    if y.shape != x.shape or y.ndim != 1:
        raise ValueError("y and x must be 1-d arrays of equal length")
    if x.size and (x.min() < 0 or x.max() >= n_levels):
        raise ValueError("level codes must lie in [0, n_levels)")
    counts = np.bincount(x, minlength=n_levels)
    empty = np.nonzero(counts == 0)[0]
    if empty.size:
        raise ValueError(f"levels with no observations: {empty.tolist()}")
    sums = np.bincount(x, weights=y, minlength=n_levels)
    return WeightedMeans(counts / len(y), sums / counts)


def objective_value(theta, means: WeightedMeans, pen: McpPenalty) -> float:
    """Loss plus penalty on consecutive gaps of the sorted coefficients."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != means.w.shape:
        raise ValueError("theta length must match the number of levels")
    loss = 0.5 * float(np.sum(means.w * (means.ybar - theta) ** 2))
    gaps = np.diff(np.sort(theta))
    return loss + float(np.sum(pen.value(gaps)))


def solve_exact(
    means: WeightedMeans, pen: McpPenalty, collect_stats: bool = False
) -> UnivariateSolution:
    """Global minimiser of the univariate objective.

    Levels are sorted by subaverage (stable on ties), the value functions
    are built stage by stage through the candidate/envelope recursion, and
    the solution is recovered by backtracking; the smallest minimiser is
    returned whenever the optimum is not unique.
    """
    order = np.argsort(means.ybar, kind="stable")
    theta_sorted, counts = _kernels._solve(
        np.ascontiguousarray(means.w[order]),
        np.ascontiguousarray(means.ybar[order]),
        pen.gamma,
        pen.lam,
    )
    theta = np.empty_like(theta_sorted)
    theta[order] = theta_sorted
    obj = objective_value(theta, means, pen)
    return UnivariateSolution(
        theta=theta,
        objective=obj,
        clusters=cluster_ids(theta, CLUSTER_TOL),
        stage_pieces=counts if collect_stats else None,
    )


def solve_discrete(
    means: WeightedMeans, pen: McpPenalty, grid=None
) -> UnivariateSolution:
    """Exact minimiser with coefficients restricted to a sorted grid.

    Tabulates stage values over the grid (O(K L^2)) and backtracks;
    argmin ties break toward the smallest grid index.  With no grid given,
    256 equispaced points spanning the subaverages are used.
    """
    if grid is None:
        lo, hi = means.ybar.min(), means.ybar.max()
        grid = np.linspace(lo, hi, 256) if hi > lo else np.array([lo])
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("grid must be a nonempty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")

    order = np.argsort(means.ybar, kind="stable")
    w = means.w[order]
    ybar = means.ybar[order]
    K, L = len(w), len(grid)

    # penalty of moving from grid[l'] (row l, col l'); +inf above the diagonal
    gaps = grid[:, None] - grid[None, :]
    pmat = np.where(gaps >= 0, pen.value(np.clip(gaps, 0.0, None)), np.inf)

    back = np.empty((K, L), dtype=np.intp)
    back[0] = np.arange(L)
    f = 0.5 * w[0] * (ybar[0] - grid) ** 2
    for k in range(1, K):
        total = f[None, :] + pmat
        back[k] = np.argmin(total, axis=1)
        f = total[np.arange(L), back[k]] + 0.5 * w[k] * (ybar[k] - grid) ** 2

    idx = int(np.argmin(f))
    theta_sorted = np.empty(K)
    theta_sorted[K - 1] = grid[idx]
    for k in range(K - 2, -1, -1):
        idx = back[k + 1][idx]
        theta_sorted[k] = grid[idx]

    theta = np.empty_like(theta_sorted)
    theta[order] = theta_sorted
    return UnivariateSolution(
        theta=theta,
        objective=objective_value(theta, means, pen),
        clusters=cluster_ids(theta, CLUSTER_TOL),
    )


def cluster_ids(theta, tol: float = CLUSTER_TOL) -> np.ndarray:
    """Group levels whose fitted values differ by at most tol; ids are
    assigned in order of increasing cluster value."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    theta = np.asarray(theta, dtype=float)
    order = np.argsort(theta, kind="stable")
    ids = np.empty(len(theta), dtype=np.intp)
    current = 0
    prev = None
    for i in order:
        if prev is not None and theta[i] - prev > tol:
            current += 1
        ids[i] = current
        prev = theta[i]
    return ids
