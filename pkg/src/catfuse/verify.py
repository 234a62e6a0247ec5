"""Independent oracles and theory-condition checks.

Contains a brute-force minimiser of the univariate objective over a grid
(plain depth-first enumeration of monotone assignments, pruned by an
admissible penalty-free bound), the least squares fit with oracular
knowledge of the true level groupings, and the separation quantities
under which that oracle fit is provably recovered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .design import Coefficients, Design
from .penalty import McpPenalty
from .univariate import WeightedMeans, objective_value

__all__ = [
    "OracleSpec",
    "SeparationReport",
    "VariableSeparation",
    "grid_oracle",
    "oracle_least_squares",
    "check_separation",
]

_MAX_ORACLE_LEVELS = 5


@dataclass(frozen=True)
class OracleSpec:
    """True level groupings and coefficients, one entry per variable.

    ``groups[j][k]`` is the true cluster id of level k of variable j and
    ``theta0[j][k]`` its true coefficient; coefficients must be constant
    within clusters.
    """

    groups: list
    theta0: list

    def __post_init__(self):
        object.__setattr__(
            self, "groups", [np.asarray(g, dtype=np.int64) for g in self.groups]
        )
        object.__setattr__(
            self, "theta0", [np.asarray(t, dtype=float) for t in self.theta0]
        )
        if len(self.groups) != len(self.theta0):
            raise ValueError("groups and theta0 must have one entry per variable")
        for g, t in zip(self.groups, self.theta0):
            if g.shape != t.shape:
                raise ValueError("group and coefficient lengths differ")
            for gid in np.unique(g):
                vals = t[g == gid]
                if np.ptp(vals) > 1e-10 * (1.0 + np.max(np.abs(vals))):
                    raise ValueError("coefficients must be constant within groups")

    @property
    def n_variables(self) -> int:
        return len(self.groups)

    def n_groups(self, j: int) -> int:
        return int(self.groups[j].max()) + 1

    @classmethod
    def from_theta(cls, theta0: list, tol: float = 0.0) -> "OracleSpec":
        """Derive groupings from equal coefficient values."""
        from .univariate import cluster_ids

        theta0 = [np.asarray(t, dtype=float) for t in theta0]
        return cls([cluster_ids(t, tol) for t in theta0], theta0)

    def centered(self, design: Design) -> "OracleSpec":
        """Recentre coefficients so each variable's count-weighted sum is 0."""
        out = []
        for j, t in enumerate(self.theta0):
            counts = design.level_counts(j)
            out.append(t - np.sum(counts * t) / counts.sum())
        return OracleSpec(self.groups, out)


@njit(cache=True)
def _grid_dfs(loss, pmat, suffix, yb_idx, best0, assign0):
    """Exhaustive DFS over nondecreasing grid assignments.

    ``suffix[k, j]`` bounds the remaining loss (penalties dropped) from
    level k onward when all remaining values stay at grid index >= j; it
    never exceeds the true remaining cost, so pruning on it is exact.
    """
    K, L = loss.shape
    best = best0
    best_assign = assign0.copy()
    assign = np.zeros(K, dtype=np.int64)
    nextj = np.zeros(K, dtype=np.int64)
    accs = np.zeros(K, dtype=np.float64)
    k = 0
    nextj[0] = 0
    accs[0] = 0.0
    while k >= 0:
        if k == K - 1:
            j0 = nextj[k]
            jprev = assign[k - 1] if k > 0 else 0
            bl = np.inf
            bj = j0
            for j in range(j0, L):
                v = loss[k, j] + (pmat[jprev, j] if k > 0 else 0.0)
                if v < bl:
                    bl = v
                    bj = j
            if accs[k] + bl < best:
                best = accs[k] + bl
                assign[k] = bj
                best_assign[:] = assign
            k -= 1
            continue
        jprev = assign[k - 1] if k > 0 else 0
        j = nextj[k]
        descended = False
        while j < L:
            step = loss[k, j] + (pmat[jprev, j] if k > 0 else 0.0)
            bound = accs[k] + step + suffix[k + 1, j]
            if bound >= best - 1e-12:
                if j >= yb_idx[k]:
                    break  # bound is nondecreasing from here on
                j += 1
                continue
            assign[k] = j
            nextj[k] = j + 1
            accs[k + 1] = accs[k] + step
            nextj[k + 1] = j
            k += 1
            descended = True
            break
        if not descended:
            k -= 1
    return best, best_assign


def grid_oracle(
    means: WeightedMeans,
    pen: McpPenalty,
    grid_points: int = 201,
    pad: float = 1.0,
) -> tuple[np.ndarray, float]:
    """Minimise the univariate objective over all monotone assignments of
    the coefficients to an equispaced grid, by plain enumeration.

    Independent of the piecewise-quadratic solver: no value-function
    recursion is used, only exhaustive search with an admissible
    penalty-free pruning bound and two trivially constructed incumbents.
    Guarded to small problems (K <= 5).
    """
    K = means.n_levels
    if K > _MAX_ORACLE_LEVELS:
        raise ValueError(f"grid oracle is limited to {_MAX_ORACLE_LEVELS} levels")
    order = np.argsort(means.ybar, kind="stable")
    w, yb = means.w[order], means.ybar[order]
    lo, hi = yb.min() - pad, yb.max() + pad
    grid = np.linspace(lo, hi, grid_points) if hi > lo else np.array([lo])
    L = len(grid)

    loss = 0.5 * w[:, None] * (yb[:, None] - grid[None, :]) ** 2
    gaps = np.clip(grid[None, :] - grid[:, None], 0.0, None)
    pmat = pen.value(gaps)
    suffix = np.zeros((K + 1, L))
    for k in range(K - 1, -1, -1):
        suffix[k] = np.minimum.accumulate((loss[k] + suffix[k + 1])[::-1])[::-1]
    yb_idx = np.searchsorted(grid, yb).astype(np.int64)

    def cost(assign):
        t = grid[assign]
        return float(
            np.sum(loss[np.arange(K), assign]) + np.sum(pen.value(np.diff(t)))
        )

    # incumbents: greedy monotone snap to the per-level best grid points,
    # and everything fused at the weighted mean
    snap = np.empty(K, dtype=np.int64)
    j = 0
    for k in range(K):
        j = max(j, int(np.argmin(loss[k][j:])) + j)
        snap[k] = j
    fuse_j = int(np.clip(np.searchsorted(grid, np.sum(w * yb) / w.sum()), 0, L - 1))
    fused = np.full(K, fuse_j, dtype=np.int64)
    best_assign, best = (snap, cost(snap))
    if cost(fused) < best:
        best_assign, best = fused, cost(fused)

    best, best_assign = _grid_dfs(loss, pmat, suffix, yb_idx, best, best_assign)
    theta = np.empty(K)
    theta[order] = grid[best_assign]
    return theta, float(objective_value(theta, means, pen))


def oracle_least_squares(design: Design, y, spec: OracleSpec) -> Coefficients:
    """Least squares with the true groupings imposed: coefficients are
    constant within each group and count-weighted to zero per variable.

    Solved by normal equations on the collapsed (group-indicator) design
    after eliminating the constraints; raises on rank deficiency.
    """
    y = np.asarray(y, dtype=float)
    if spec.n_variables != design.n_variables:
        raise ValueError("oracle spec does not match design")
    n = design.n
    mu = float(y.mean())
    resid = y - mu

    blocks = []
    free_cols = 0
    for j in range(design.n_variables):
        g = spec.groups[j]
        s = spec.n_groups(j)
        counts = design.level_counts(j)
        gcounts = np.bincount(g, weights=counts, minlength=s)
        # indicator of group membership per observation
        G = np.zeros((n, s))
        gobs = g[design.categorical[j]]
        G[np.arange(n), gobs] = 1.0
        if s == 1:
            blocks.append((j, g, None, None))
            continue
        # basis of the constraint null space: last group absorbs the rest
        Z = np.zeros((s, s - 1))
        Z[: s - 1, :] = np.eye(s - 1)
        Z[s - 1, :] = -gcounts[: s - 1] / gcounts[s - 1]
        blocks.append((j, g, G @ Z, Z))
        free_cols += s - 1

    if design.continuous is not None and design.n_continuous:
        Zc = design.continuous
        free_cols += Zc.shape[1]
    else:
        Zc = None

    cols = [blk[2] for blk in blocks if blk[2] is not None]
    if Zc is not None:
        cols.append(Zc)
    theta = [np.zeros(k) for k in design.n_levels]
    beta = np.zeros(design.n_continuous)
    if cols:
        A = np.hstack(cols)
        sol, _, rank, _ = np.linalg.lstsq(A, resid, rcond=None)
        if rank < A.shape[1]:
            raise ValueError("collapsed oracle design is rank deficient")
        pos = 0
        for j, g, AZ, Z in blocks:
            if AZ is None:
                continue
            s = Z.shape[0]
            alpha = Z @ sol[pos : pos + s - 1]
            theta[j] = alpha[g]
            pos += s - 1
        if Zc is not None:
            beta = sol[pos:]
    return Coefficients(mu=mu, theta=theta, beta=beta)


@dataclass(frozen=True)
class VariableSeparation:
    """Separation diagnostics for one variable."""

    n_levels: int
    n_groups: int
    delta: float
    n0_min: int
    n0_max: int
    n_min: int
    gamma_lower: float
    gamma_upper: float
    lam_effective: float
    global_bound: float
    blockwise_bound: float
    global_ok: bool
    blockwise_ok: bool
    prob_bound_nmin: float
    prob_bound_n_over_k: float


@dataclass(frozen=True)
class SeparationReport:
    """Whether the minimum signal separations clear the recovery bounds.

    ``eta`` measures how balanced the group sizes are; the per-variable
    bounds scale like sqrt(gamma * max(gamma, eta * s_j)) times the
    effective penalty level.  Probability bounds are reported raw, even
    when vacuous; display-side clipping to [0, 1] is the caller's job.
    """

    eta: float
    variables: list[VariableSeparation]
    satisfied_global: bool
    satisfied_blockwise: bool
    multivar_prob_bound: float


def min_gap(theta0: np.ndarray) -> float:
    """Smallest nonzero pairwise difference, +inf when all equal."""
    vals = np.unique(theta0)
    if len(vals) < 2:
        return np.inf
    return float(np.min(np.diff(vals)))


def check_separation(
    spec: OracleSpec,
    design: Design,
    gamma: float,
    lam: float,
    sigma: float,
    scale_lambda_by_levels: bool = True,
) -> SeparationReport:
    """Evaluate the oracle-recovery separation conditions and tail bounds.

    With ``scale_lambda_by_levels`` the per-variable penalty level is
    lam * sqrt(K_j), matching what the fit engine applies; pass False to
    check a direct univariate solve at level lam.
    """
    p = spec.n_variables
    n = design.n
    etas = []
    per_var = []
    for j in range(p):
        s = spec.n_groups(j)
        counts = design.level_counts(j)
        gcounts = np.bincount(spec.groups[j], weights=counts, minlength=s)
        n0_min, n0_max = gcounts.min(), gcounts.max()
        etas.append(min(s * n0_min / n, n / (s * n0_max)))
    eta = float(np.clip(min(etas), 0.0, 1.0))

    sat_glob = True
    sat_block = True
    multi_sum = 0.0
    for j in range(p):
        K_j = design.n_levels[j]
        s = spec.n_groups(j)
        counts = design.level_counts(j)
        gcounts = np.bincount(spec.groups[j], weights=counts, minlength=s)
        lam_j = lam * np.sqrt(K_j) if scale_lambda_by_levels else lam
        g_lo = min(gamma, eta * s)
        g_hi = max(gamma, eta * s)
        delta = min_gap(spec.theta0[j])
        bound1 = 3.0 * (1.0 + np.sqrt(2.0) / eta) * np.sqrt(gamma * g_hi) * lam_j
        bound2 = 3.0 * (4.0 / 3.0 + np.sqrt(2.0) / eta) * np.sqrt(gamma * g_hi) * lam_j
        ok1 = bool(delta >= bound1)
        ok2 = bool(delta >= bound2)
        n_min_j = int(counts.min())
        exparg = eta * s * g_lo * lam_j**2 / (8.0 * sigma**2)
        prob_nmin = 1.0 - 2.0 * np.exp(-n_min_j * exparg + np.log(K_j))
        prob_nk = 1.0 - 2.0 * np.exp(-(n / K_j) * exparg + np.log(K_j))
        multi_sum += np.exp(-n_min_j * eta * g_lo * s * lam_j**2 / (8.0 * sigma**2) + np.log(K_j))
        sat_glob &= ok1
        sat_block &= ok2
        per_var.append(
            VariableSeparation(
                n_levels=K_j,
                n_groups=s,
                delta=delta,
                n0_min=int(gcounts.min()),
                n0_max=int(gcounts.max()),
                n_min=n_min_j,
                gamma_lower=float(g_lo),
                gamma_upper=float(g_hi),
                lam_effective=float(lam_j),
                global_bound=float(bound1),
                blockwise_bound=float(bound2),
                global_ok=ok1,
                blockwise_ok=ok2,
                prob_bound_nmin=float(prob_nmin),
                prob_bound_n_over_k=float(prob_nk),
            )
        )
    return SeparationReport(
        eta=eta,
        variables=per_var,
        satisfied_global=sat_glob,
        satisfied_blockwise=sat_block,
        multivar_prob_bound=float(1.0 - 4.0 * multi_sum),
    )
