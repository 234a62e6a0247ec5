"""Multivariate fitting: block coordinate descent over categorical blocks
with exact univariate fusion solves, lasso-style updates for continuous
covariates, penalty paths with warm starts, cross-validation, EBIC
selection, a proximal-Newton loop for logistic models, and a two-level
hierarchical variant.

Each block update collapses the partial residuals of one variable to
per-level weighted means, solves the univariate fusion problem exactly at
penalty level lam * sqrt(K_j), and recentres the block to keep the
count-weighted coefficient sums at zero (the shift is absorbed by the
intercept, so the objective is untouched).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .design import Coefficients, Design
from .penalty import McpPenalty
from .univariate import WeightedMeans, cluster_ids, solve_exact

__all__ = [
    "FitConfig",
    "BcdResult",
    "PathEntry",
    "SolutionPath",
    "CvResult",
    "fit_intercept",
    "bcd_fit",
    "lambda_max",
    "fit_path",
    "cross_validate",
    "ebic_select",
    "logistic_fit",
    "hierarchical_fit",
    "predict",
]

# IRLS safeguards for separation: weight floor and working-response cap.
_IRLS_WEIGHT_FLOOR = 1e-5
_IRLS_RESPONSE_CAP = 1.0 / _IRLS_WEIGHT_FLOOR

# Descent violations beyond this relative slack fail hard when checking.
_DESCENT_SLACK = 1e-10


@dataclass(frozen=True)
class FitConfig:
    """Tuning knobs with the defaults used throughout.

    ``gamma_grid=None`` resolves to (8, 32) for the linear family and
    (100,) for logistic, where the larger default concavity scale aids
    convergence of the proximal-Newton steps.
    """

    gamma_grid: tuple | None = None
    path_len: int = 100
    path_ratio: float = 0.01
    alpha: float = 0.0
    bcd_tol: float = 1e-9
    bcd_max_sweeps: int = 1000
    family: str = "linear"
    pn_max_iters: int = 25
    pn_tol: float = 1e-8
    cv_folds: int = 5
    seed: int = 0
    check_descent: bool = False
    standardize_continuous: bool = False

    def __post_init__(self):
        if self.family not in ("linear", "logistic"):
            raise ValueError(f"unknown family {self.family!r}")
        if not (0.0 < self.path_ratio < 1.0):
            raise ValueError("path_ratio must lie in (0, 1)")
        for name in ("bcd_tol", "pn_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")

    def resolved_gammas(self) -> tuple:
        if self.gamma_grid is not None:
            return tuple(float(g) for g in self.gamma_grid)
        return (100.0,) if self.family == "logistic" else (8.0, 32.0)


@dataclass
class BcdResult:
    """A blockwise-optimum candidate plus convergence bookkeeping."""

    coef: Coefficients
    converged: bool
    sweeps: int
    objective: float
    rss: float


def fit_intercept(y) -> float:
    """The intercept is the plain response mean, independent of tuning."""
    y = np.asarray(y, dtype=float)
    if y.size < 1:
        raise ValueError("need at least one observation")
    return float(y.mean())


def _soft(x: float, t: float) -> float:
    return np.sign(x) * max(abs(x) - t, 0.0)


def _block_penalty(theta: np.ndarray, present: np.ndarray, pen: McpPenalty) -> float:
    vals = theta[present] if present is not None else theta
    if len(vals) < 2:
        return 0.0
    return float(np.sum(pen.value(np.diff(np.sort(vals)))))


class _BcdState:
    """Mutable residual/coefficient state shared by the sweep variants."""

    def __init__(self, design, y, gamma, lam, init, cfg, obs_w):
        self.design = design
        self.n = design.n
        self.gamma = gamma
        self.lam = lam
        self.cfg = cfg
        self.v = np.ones(self.n) if obs_w is None else np.asarray(obs_w, dtype=float)
        self.weighted = obs_w is not None
        y = np.asarray(y, dtype=float)
        if init is None:
            init = Coefficients.zeros(design)
        self.coef = init.copy()
        if self.weighted:
            self.coef.mu = float(np.sum(self.v * y) / np.sum(self.v))
        else:
            self.coef.mu = fit_intercept(y)
        self.Z = design.continuous
        self.zscale = None
        if self.Z is not None and cfg.standardize_continuous:
            sd = self.Z.std(axis=0)
            self.zscale = np.where(sd > 0, sd, 1.0)
        self.resid = y - self.coef.linear_predictor(design)
        self.pens = [
            McpPenalty(gamma, lam * np.sqrt(k)) for k in design.n_levels
        ]
        self.pen_vals = [
            _block_penalty(self.coef.theta[j], None, self.pens[j])
            for j in range(design.n_variables)
        ]

    def objective(self) -> float:
        q = 0.5 * float(np.dot(self.v, self.resid**2)) / self.n + sum(self.pen_vals)
        if len(self.coef.beta):
            q += self.cfg.alpha * float(np.sum(np.abs(self.coef.beta)))
        return q

    def rss(self) -> float:
        return float(np.dot(self.v, self.resid**2))

    def update_block(self, j: int) -> None:
        codes = self.design.categorical[j]
        K = self.design.n_levels[j]
        self.resid += self.coef.theta[j][codes]
        wsum = np.bincount(codes, weights=self.v, minlength=K)
        ssum = np.bincount(codes, weights=self.v * self.resid, minlength=K)
        present = wsum > 0
        means = WeightedMeans(wsum[present] / self.n, ssum[present] / wsum[present])
        sol = solve_exact(means, self.pens[j])
        theta = np.zeros(K)
        theta[present] = sol.theta
        shift = float(np.sum(wsum * theta) / wsum.sum())
        theta[present] -= shift
        self.coef.mu += shift
        self.resid -= shift
        self.resid -= theta[codes]
        self.coef.theta[j] = theta
        self.pen_vals[j] = _block_penalty(theta, present, self.pens[j])

    def update_continuous(self) -> None:
        if self.Z is None or not self.Z.shape[1]:
            return
        alpha = self.cfg.alpha
        for l in range(self.Z.shape[1]):
            z = self.Z[:, l]
            scale = 1.0 if self.zscale is None else self.zscale[l]
            zs = z / scale
            self.resid += zs * (self.coef.beta[l] * scale)
            num = float(np.dot(self.v * zs, self.resid)) / self.n
            den = float(np.dot(self.v * zs, zs)) / self.n
            b = _soft(num, alpha) / den if den > 0 else 0.0
            self.coef.beta[l] = b / scale
            self.resid -= zs * b

    def update_intercept(self) -> None:
        # only exercised for weighted (working-response) problems; the
        # linear intercept is the response mean and stays put
        shift = float(np.sum(self.v * self.resid) / np.sum(self.v))
        self.coef.mu += shift
        self.resid -= shift

    def sweep(self) -> None:
        check = self.cfg.check_descent
        q_prev = self.objective() if check else None
        for j in range(self.design.n_variables):
            self.update_block(j)
            if check:
                q = self.objective()
                if q > q_prev + _DESCENT_SLACK * (1.0 + abs(q_prev)):
                    raise RuntimeError(
                        f"objective increased in block {j}: {q_prev} -> {q}"
                    )
                q_prev = q
        self.update_continuous()
        if self.weighted:
            self.update_intercept()
        if check:
            q = self.objective()
            if q > q_prev + _DESCENT_SLACK * (1.0 + abs(q_prev)):
                raise RuntimeError(f"objective increased after sweep tail: {q}")


def bcd_fit(
    design: Design,
    y,
    gamma: float,
    lam: float,
    init: Coefficients | None = None,
    config: FitConfig | None = None,
    obs_weights=None,
) -> BcdResult:
    """Cycle exact univariate solves over the categorical blocks (and
    coordinate updates over continuous covariates) until the relative
    objective decrease over a full sweep drops below ``bcd_tol``.

    The objective never increases across block updates; hitting
    ``bcd_max_sweeps`` returns with ``converged=False`` rather than
    raising.
    """
    cfg = config or FitConfig()
    state = _BcdState(design, y, gamma, lam, init, cfg, obs_weights)
    q = state.objective()
    if not np.isfinite(q):
        raise ValueError("objective is not finite at the initial point")
    converged = False
    sweeps = 0
    for sweeps in range(1, cfg.bcd_max_sweeps + 1):
        state.sweep()
        q_new = state.objective()
        if not np.isfinite(q_new):
            raise ValueError("objective diverged")
        if q - q_new <= cfg.bcd_tol * max(abs(q), 1e-300):
            converged = True
            q = q_new
            break
        q = q_new
    return BcdResult(
        coef=state.coef,
        converged=converged,
        sweeps=sweeps,
        objective=q,
        rss=state.rss(),
    )


def _all_fused(coef: Coefficients, tol: float = 1e-8) -> bool:
    return all(np.max(np.abs(t)) <= tol if len(t) else True for t in coef.theta)


def lambda_max(
    design: Design, y, gamma: float, config: FitConfig | None = None
) -> float:
    """Smallest penalty level (within 1%) at which descent from the zero
    initialiser fuses every variable to a single cluster.

    The search starts from a sufficient level derived from the null
    recovery condition max_k |ybar_k| < (2 ^ sqrt(gamma)) * lam_j applied
    to the centred subaverages of each block, then halves and bisects.
    """
    cfg = config or FitConfig()
    y = np.asarray(y, dtype=float)
    r = y - y.mean()
    cap = 0.0
    for j in range(design.n_variables):
        codes = design.categorical[j]
        K = design.n_levels[j]
        counts = np.bincount(codes, minlength=K)
        ybar = np.bincount(codes, weights=r, minlength=K) / counts
        cap = max(
            cap,
            float(np.max(np.abs(ybar)))
            / (min(2.0, np.sqrt(gamma)) * np.sqrt(K)),
        )
    scale = max(1.0, float(np.max(np.abs(r))) if len(r) else 1.0)
    floor = 1e-10 * scale
    hi = max(cap * 1.000001, floor)

    def fuses(lam):
        res = bcd_fit(design, y, gamma, lam, config=cfg)
        return _all_fused(res.coef)

    tries = 0
    while not fuses(hi) and tries < 60:
        hi *= 2.0
        tries += 1
    lo = 0.0
    cur = hi
    while cur > floor:
        cur *= 0.5
        if fuses(cur):
            hi = cur
        else:
            lo = cur
            break
    if lo == 0.0:
        return max(hi, floor)
    while hi - lo > 0.01 * hi:
        mid = 0.5 * (lo + hi)
        if fuses(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class PathEntry:
    gamma: float
    lam: float
    coef: Coefficients
    objective: float
    rss: float
    df: int
    converged: bool
    init_label: str
    cv_error: float | None = None
    ebic: float | None = None


@dataclass
class SolutionPath:
    entries: list[PathEntry] = field(default_factory=list)

    def for_gamma(self, gamma: float) -> list[PathEntry]:
        return [e for e in self.entries if e.gamma == gamma]

    def __len__(self):
        return len(self.entries)


def degrees_of_freedom(coef: Coefficients) -> int:
    """1 + sum over variables of (#distinct fitted values - 1) plus the
    number of nonzero continuous coefficients."""
    df = 1
    for t in coef.theta:
        if len(t):
            df += int(cluster_ids(t).max())
    df += int(np.sum(coef.beta != 0))
    return df


def _geometric_lambdas(lam_max: float, cfg: FitConfig) -> np.ndarray:
    return lam_max * cfg.path_ratio ** (
        np.arange(cfg.path_len) / max(cfg.path_len - 1, 1)
    )


def fit_path(
    design: Design,
    y,
    config: FitConfig | None = None,
    lambdas_by_gamma: dict | None = None,
) -> SolutionPath:
    """Fit a geometric penalty path per concavity scale, warm starting each
    level at the previous solution.

    The first entry per scale is the fully fused model by construction of
    the path start.  ``lambdas_by_gamma`` overrides the automatic grids
    (used by cross-validation to align fold paths).
    """
    cfg = config or FitConfig()
    fit_one = _family_fitter(cfg)
    path = SolutionPath()
    for gamma in cfg.resolved_gammas():
        if lambdas_by_gamma is not None:
            lambdas = np.asarray(lambdas_by_gamma[gamma], dtype=float)
        else:
            lambdas = _geometric_lambdas(lambda_max(design, y, gamma, cfg), cfg)
        coef = None
        label = "zero"
        for i, lam in enumerate(lambdas):
            res = fit_one(design, y, gamma, float(lam), coef)
            path.entries.append(
                PathEntry(
                    gamma=gamma,
                    lam=float(lam),
                    coef=res.coef,
                    objective=res.objective,
                    rss=res.rss,
                    df=degrees_of_freedom(res.coef),
                    converged=res.converged,
                    init_label=label,
                )
            )
            coef = res.coef
            label = f"gamma={gamma:g},index={i}"
    return path


def _family_fitter(cfg: FitConfig):
    if cfg.family == "logistic":

        def fit_one(design, y, gamma, lam, init):
            return logistic_fit(design, y, gamma, lam, init=init, config=cfg)

    else:

        def fit_one(design, y, gamma, lam, init):
            return bcd_fit(design, y, gamma, lam, init=init, config=cfg)

    return fit_one


def _subset_design(design: Design, idx: np.ndarray) -> Design:
    d = Design.__new__(Design)
    d.categorical = [c[idx] for c in design.categorical]
    d.n_levels = design.n_levels
    d.n = len(idx)
    d.labels = design.labels
    if design.continuous is not None:
        Z = design.continuous[idx]
        d.continuous_means = Z.mean(axis=0)
        d.continuous = Z - d.continuous_means
    else:
        d.continuous = None
        d.continuous_means = None
    d.hierarchy = design.hierarchy
    return d


def _holdout_error(coef, design, test_idx, y, family, train_design):
    codes = [c[test_idx] for c in design.categorical]
    # levels absent from the training rows score through the unseen rule
    masked = []
    for j, c in enumerate(codes):
        seen = np.zeros(design.n_levels[j], dtype=bool)
        seen[np.unique(train_design.categorical[j])] = True
        masked.append(np.where(seen[c], c, -1))
    Z = design.continuous[test_idx] if design.continuous is not None else None
    center = train_design.continuous_means if Z is not None else None
    if Z is not None:
        # design.continuous is already centred on the full data; undo and
        # recentre on the training rows
        Z = Z + design.continuous_means
    pred = predict(coef, masked, Z, continuous_center=center, family=family)
    yt = np.asarray(y, dtype=float)[test_idx]
    if family == "logistic":
        p = np.clip(pred, 1e-12, 1 - 1e-12)
        return float(np.mean(-2.0 * (yt * np.log(p) + (1 - yt) * np.log(1 - p))))
    return float(np.mean((yt - pred) ** 2))


@dataclass
class CvResult:
    best_gamma: float
    best_lambda: float
    gammas: tuple
    lambdas: dict
    errors: dict  # gamma -> array of mean held-out errors along the path


def cross_validate(
    design: Design, y, config: FitConfig | None = None
) -> tuple[float, float, CvResult]:
    """Seeded-shuffle K-fold selection of (gamma, lambda) over the path.

    The lambda grids are computed once on the full data so the table is
    aligned across folds.  Error ties resolve to the larger lambda, then
    the smaller gamma.
    """
    cfg = config or FitConfig()
    if cfg.cv_folds < 2:
        raise ValueError("need at least two folds")
    y = np.asarray(y, dtype=float)
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(design.n)
    folds = np.array_split(perm, cfg.cv_folds)

    lambdas = {
        g: _geometric_lambdas(lambda_max(design, y, g, cfg), cfg)
        for g in cfg.resolved_gammas()
    }
    errors = {g: np.zeros(cfg.path_len) for g in cfg.resolved_gammas()}
    for fold in folds:
        train_idx = np.setdiff1d(np.arange(design.n), fold, assume_unique=False)
        dtr = _subset_design(design, train_idx)
        path = fit_path(dtr, y[train_idx], cfg, lambdas_by_gamma=lambdas)
        for g in cfg.resolved_gammas():
            for i, entry in enumerate(path.for_gamma(g)):
                errors[g][i] += (
                    _holdout_error(entry.coef, design, fold, y, cfg.family, dtr)
                    / cfg.cv_folds
                )

    best = None
    for g in cfg.resolved_gammas():
        for i, lam in enumerate(lambdas[g]):
            cand = (errors[g][i], float(lam), g)
            if best is None:
                best = cand
                continue
            err0, lam0, g0 = best
            tol = 1e-12 * (1.0 + abs(err0))
            if cand[0] < err0 - tol:
                best = cand
            elif abs(cand[0] - err0) <= tol and (
                cand[1] > lam0 or (cand[1] == lam0 and g < g0)
            ):
                best = cand
    _, best_lam, best_gamma = best
    result = CvResult(
        best_gamma=best_gamma,
        best_lambda=best_lam,
        gammas=cfg.resolved_gammas(),
        lambdas=lambdas,
        errors=errors,
    )
    return best_gamma, best_lam, result


def ebic_select(
    path: SolutionPath, n: int, total_levels: int, zeta: float = 1.0
) -> PathEntry:
    """Entry minimising n*log(RSS/n) + df*(log n + 2*zeta*log(total_levels)).

    zeta = 0 reduces to plain BIC ranking.
    """
    if not path.entries:
        raise ValueError("empty path")
    penalty = np.log(n) + 2.0 * zeta * np.log(max(total_levels, 1))
    best = None
    for e in path.entries:
        rss = max(e.rss, 1e-300)
        score = n * np.log(rss / n) + e.df * penalty
        e.ebic = float(score)
        if best is None or score < best.ebic:
            best = e
    return best


def _log_nll(y, eta) -> float:
    # mean negative log-likelihood, stable for large |eta|
    return float(np.mean(np.logaddexp(0.0, eta) - y * eta))


def _penalized_logistic_objective(coef, design, y, gamma, lam, alpha) -> float:
    eta = coef.linear_predictor(design)
    q = _log_nll(y, eta)
    for j in range(design.n_variables):
        pen = McpPenalty(gamma, lam * np.sqrt(design.n_levels[j]))
        q += _block_penalty(coef.theta[j], None, pen)
    if len(coef.beta):
        q += alpha * float(np.sum(np.abs(coef.beta)))
    return q


def logistic_fit(
    design: Design,
    y,
    gamma: float,
    lam: float,
    init: Coefficients | None = None,
    config: FitConfig | None = None,
) -> BcdResult:
    """Proximal-Newton fit for binary responses.

    Each outer iteration solves the weighted least-squares surrogate built
    from the current probabilities (weights floored, working response
    capped), halving the step whenever the penalized deviance would
    increase.  The accepted objective sequence is non-increasing.
    """
    cfg = config or FitConfig(family="logistic")
    y = np.asarray(y, dtype=float)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("logistic family needs a 0/1 response")
    if y.min() == y.max():
        raise ValueError("both classes must be present")

    if init is None:
        coef = Coefficients.zeros(design)
        pbar = y.mean()
        coef.mu = float(np.log(pbar / (1 - pbar)))
    else:
        coef = init.copy()

    q = _penalized_logistic_objective(coef, design, y, gamma, lam, cfg.alpha)
    converged = False
    sweeps_total = 0
    it = 0
    for it in range(1, cfg.pn_max_iters + 1):
        eta = coef.linear_predictor(design)
        p = 1.0 / (1.0 + np.exp(-eta))
        v = np.clip(p * (1.0 - p), _IRLS_WEIGHT_FLOOR, None)
        z = eta + np.clip((y - p) / v, -_IRLS_RESPONSE_CAP, _IRLS_RESPONSE_CAP)
        inner_cfg = replace(cfg, bcd_max_sweeps=min(cfg.bcd_max_sweeps, 200))
        res = bcd_fit(design, z, gamma, lam, init=coef, config=inner_cfg, obs_weights=v)
        sweeps_total += res.sweeps

        step = 1.0
        accepted = False
        while step >= 1e-4:
            cand = Coefficients(
                mu=coef.mu + step * (res.coef.mu - coef.mu),
                theta=[
                    a + step * (b - a) for a, b in zip(coef.theta, res.coef.theta)
                ],
                beta=coef.beta + step * (res.coef.beta - coef.beta),
            )
            q_cand = _penalized_logistic_objective(
                cand, design, y, gamma, lam, cfg.alpha
            )
            if q_cand <= q + 1e-12 * (1.0 + abs(q)):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        rel_change = (q - q_cand) / max(abs(q), 1e-300)
        coef, q = cand, q_cand
        if rel_change < cfg.pn_tol:
            converged = True
            break

    # restore count-weighted centring per variable; the shift moves into
    # the intercept so predictions are unchanged
    for j in range(design.n_variables):
        counts = design.level_counts(j)
        shift = float(np.sum(counts * coef.theta[j]) / counts.sum())
        coef.theta[j] = coef.theta[j] - shift
        coef.mu += shift

    eta = coef.linear_predictor(design)
    dev = 2.0 * design.n * _log_nll(y, eta)
    return BcdResult(
        coef=coef,
        converged=converged,
        sweeps=it,
        objective=q,
        rss=dev,
    )


def hierarchical_fit(
    design: Design,
    y,
    gamma: float,
    lam_parent: float,
    lam_child: float,
    init: Coefficients | None = None,
    config: FitConfig | None = None,
) -> BcdResult:
    """Two-level fit where variable 2's levels subdivide variable 1's.

    Fusion within each child group G_k is penalized at level
    lam_child * sqrt(|G_k|) under the per-group constraint that the
    count-weighted child coefficients sum to zero; the group shifts are
    absorbed by the parent level, whose own recentring lands in the
    intercept.  The child subproblems are mutually independent given the
    parent block (the least squares term separates over groups), so they
    could run concurrently; they are solved in sequence here for
    determinism.
    """
    if design.hierarchy is None:
        raise ValueError("design has no hierarchy")
    cfg = config or FitConfig()
    y = np.asarray(y, dtype=float)
    n = design.n
    coef = (init or Coefficients.zeros(design)).copy()
    coef.mu = fit_intercept(y)
    x1, x2 = design.categorical
    K1, K2 = design.n_levels
    counts1 = design.level_counts(0)
    counts2 = design.level_counts(1)
    pen_parent = McpPenalty(gamma, lam_parent * np.sqrt(K1))
    pen_child = [
        McpPenalty(gamma, lam_child * np.sqrt(len(g))) for g in design.hierarchy
    ]
    resid = y - coef.linear_predictor(design)

    def objective():
        q = 0.5 * float(np.sum(resid**2)) / n
        q += _block_penalty(coef.theta[0], None, pen_parent)
        for k, g in enumerate(design.hierarchy):
            q += _block_penalty(coef.theta[1][g], None, pen_child[k])
        if len(coef.beta):
            q += cfg.alpha * float(np.sum(np.abs(coef.beta)))
        return q

    def recenter_parent():
        shift = float(np.sum(counts1 * coef.theta[0]) / n)
        coef.theta[0] = coef.theta[0] - shift
        coef.mu += shift

    q = objective()
    converged = False
    sweeps = 0
    for sweeps in range(1, cfg.bcd_max_sweeps + 1):
        # parent block
        resid += coef.theta[0][x1]
        sums = np.bincount(x1, weights=resid, minlength=K1)
        means = WeightedMeans(counts1 / n, sums / counts1)
        theta1 = solve_exact(means, pen_parent).theta
        shift = float(np.sum(counts1 * theta1) / n)
        theta1 = theta1 - shift
        coef.theta[0] = theta1
        coef.mu += shift
        resid -= theta1[x1] + shift

        # child groups, independent given the parent block
        for k, g in enumerate(design.hierarchy):
            rows = x1 == k
            codes_local = np.searchsorted(g, x2[rows])
            resid[rows] += coef.theta[1][g][codes_local]
            wsum = np.bincount(codes_local, minlength=len(g)).astype(float)
            ssum = np.bincount(codes_local, weights=resid[rows], minlength=len(g))
            sol = solve_exact(WeightedMeans(wsum / n, ssum / wsum), pen_child[k])
            shift = float(np.sum(wsum * sol.theta) / wsum.sum())
            local = sol.theta - shift
            coef.theta[1][g] = local
            # the group shift belongs to the parent level
            coef.theta[0][k] += shift
            resid[rows] -= local[codes_local] + shift
        recenter_parent()
        resid = y - coef.linear_predictor(design)

        if design.continuous is not None and design.n_continuous:
            for l in range(design.continuous.shape[1]):
                z = design.continuous[:, l]
                resid += z * coef.beta[l]
                num = float(np.dot(z, resid)) / n
                den = float(np.dot(z, z)) / n
                coef.beta[l] = _soft(num, cfg.alpha) / den if den > 0 else 0.0
                resid -= z * coef.beta[l]

        q_new = objective()
        if not np.isfinite(q_new):
            raise ValueError("objective diverged")
        if q - q_new <= cfg.bcd_tol * max(abs(q), 1e-300):
            converged = True
            q = q_new
            break
        q = q_new
    return BcdResult(
        coef=coef,
        converged=converged,
        sweeps=sweeps,
        objective=q,
        rss=float(np.sum(resid**2)),
    )


def predict(
    coef: Coefficients,
    categorical,
    continuous=None,
    continuous_center=None,
    family: str = "linear",
) -> np.ndarray:
    """Predictions for new rows encoded against the training levels.

    ``categorical`` holds one code array per variable with -1 marking a
    level unseen in training, which contributes nothing (intercept-only
    for that variable).  Logistic predictions are probabilities.
    """
    categorical = [np.asarray(c, dtype=np.int64) for c in categorical]
    n = len(categorical[0]) if categorical else (len(continuous) if continuous is not None else 0)
    eta = np.full(n, coef.mu, dtype=float)
    for j, codes in enumerate(categorical):
        known = codes >= 0
        eta[known] += coef.theta[j][codes[known]]
    if continuous is not None and len(coef.beta):
        Z = np.atleast_2d(np.asarray(continuous, dtype=float))
        if continuous_center is not None:
            Z = Z - continuous_center
        eta += Z @ coef.beta
    if family == "logistic":
        return 1.0 / (1.0 + np.exp(-eta))
    return eta
