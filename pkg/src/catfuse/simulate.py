"""Simulation harness: correlated categorical designs through a Gaussian
copula, response generation, prediction/selection metrics, and the
level-splitting corruption used to probe robustness to spurious levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .design import Coefficients, Design
from .fit import predict
from .verify import OracleSpec

__all__ = [
    "SimSpec",
    "TrueModel",
    "Metrics",
    "gen_design",
    "gen_response",
    "mspe",
    "adjusted_rand_index",
    "selection_rates",
    "split_levels",
]

_REDRAW_LIMIT = 100


@dataclass(frozen=True)
class SimSpec:
    """Configuration of one synthetic data generating process.

    ``theta0[j]`` is the coefficient template of variable j (length
    ``n_levels``); the realized coefficients are recentred per draw to be
    count-weighted zero.  ``rho`` is the target pairwise correlation of
    the uniform margins driving the level draws.
    """

    n: int
    p: int
    rho: float = 0.0
    n_levels: int = 24
    theta0: list = field(default_factory=list)
    sigma2: float = 1.0
    mu0: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.rho < 1.0):
            raise ValueError("rho must lie in [0, 1)")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        templates = [np.asarray(t, dtype=float) for t in self.theta0]
        if len(templates) != self.p:
            raise ValueError("need one coefficient template per variable")
        for t in templates:
            if t.shape != (self.n_levels,):
                raise ValueError("template length must equal n_levels")
        object.__setattr__(self, "theta0", templates)

    def oracle(self) -> OracleSpec:
        return OracleSpec.from_theta([t.copy() for t in self.theta0])


@dataclass(frozen=True)
class TrueModel:
    """The realized regression function: intercept plus recentred level
    effects."""

    mu0: float
    theta: list

    def signal(self, design: Design) -> np.ndarray:
        g = np.full(design.n, self.mu0)
        for j, codes in enumerate(design.categorical):
            g += self.theta[j][codes]
        return g


@dataclass
class Metrics:
    mspe: float
    ari: float
    fpr: float
    fnr: float
    df: int


def _copula_uniforms(spec: SimSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    # off-diagonal 2*sin(pi*rho/6) makes the uniform margins correlate at rho
    W = rng.standard_normal((n, spec.p))
    if spec.rho > 0 and spec.p > 1:
        r = 2.0 * np.sin(np.pi * spec.rho / 6.0)
        sigma = np.full((spec.p, spec.p), r)
        np.fill_diagonal(sigma, 1.0)
        W = W @ np.linalg.cholesky(sigma).T
    return ndtr(W)


def gen_design(
    spec: SimSpec,
    rng: np.random.Generator | None = None,
    require_all_levels: bool = True,
) -> Design:
    """Draw level codes by quantising copula uniforms into ``n_levels``
    bins; realizations with an empty level are redrawn (bounded retries)."""
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    K = spec.n_levels
    for _ in range(_REDRAW_LIMIT):
        U = _copula_uniforms(spec, rng, spec.n)
        X = np.clip(np.ceil(K * U).astype(np.int64) - 1, 0, K - 1)
        if not require_all_levels:
            break
        counts_ok = all(
            len(np.bincount(X[:, j], minlength=K).nonzero()[0]) == K
            for j in range(spec.p)
        )
        if counts_ok:
            break
    else:
        raise RuntimeError("could not realize a design with all levels present")
    return Design([X[:, j] for j in range(spec.p)], n_levels=[K] * spec.p)


def gen_response(
    design: Design, spec: SimSpec, rng: np.random.Generator | None = None
) -> tuple[np.ndarray, TrueModel]:
    """Gaussian response around the recentred template effects."""
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    centered = []
    for j, t in enumerate(spec.theta0):
        counts = design.level_counts(j)
        centered.append(t - np.sum(counts * t) / counts.sum())
    model = TrueModel(mu0=spec.mu0, theta=centered)
    y = model.signal(design) + rng.normal(0.0, np.sqrt(spec.sigma2), design.n)
    return y, model


def mspe(
    coef: Coefficients,
    truth: TrueModel,
    spec: SimSpec,
    n_test: int = 100_000,
    seed: int = 1,
) -> float:
    """Monte Carlo mean squared prediction error over fresh covariate
    draws (noiseless targets)."""
    rng = np.random.default_rng(seed)
    U = _copula_uniforms(spec, rng, n_test)
    X = np.clip(np.ceil(spec.n_levels * U).astype(np.int64) - 1, 0, spec.n_levels - 1)
    codes = [X[:, j] for j in range(spec.p)]
    g = np.full(n_test, truth.mu0)
    for j in range(spec.p):
        g += truth.theta[j][codes[j]]
    ghat = predict(coef, codes)
    return float(np.mean((g - ghat) ** 2))


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected pair-counting agreement of two partitions.

    Zero when exactly one side is the all-in-one clustering; 1 for equal
    (possibly trivial) partitions.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("partitions must be 1-d arrays of equal length")
    n = len(a)
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    na, nb = ai.max() + 1, bi.max() + 1
    cont = np.zeros((na, nb), dtype=np.int64)
    np.add.at(cont, (ai, bi), 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_cells = comb2(cont.astype(float)).sum()
    sum_a = comb2(cont.sum(axis=1).astype(float)).sum()
    sum_b = comb2(cont.sum(axis=0).astype(float)).sum()
    total = comb2(float(n))
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    denom = max_index - expected
    if denom == 0:
        return 1.0
    return float((sum_cells - expected) / denom)


def selection_rates(theta: list, spec: OracleSpec, tol: float = 1e-8):
    """False positive and false negative selection rates over variables.

    A variable is selected when any fitted coefficient exceeds tol in
    absolute value; truth is null when its template has a single group.
    """
    if len(theta) != spec.n_variables:
        raise ValueError("variable count mismatch")
    fp = fn = n_null = n_signal = 0
    for j, t in enumerate(theta):
        selected = bool(np.max(np.abs(t)) > tol) if len(t) else False
        is_null = spec.n_groups(j) == 1
        if is_null:
            n_null += 1
            fp += selected
        else:
            n_signal += 1
            fn += not selected
    fpr = fp / n_null if n_null else 0.0
    fnr = fn / n_signal if n_signal else 0.0
    return fpr, fnr


def split_levels(
    design: Design, m: int, seed: int = 0
) -> tuple[Design, list[np.ndarray]]:
    """Corrupt the design by repeatedly splitting levels in two.

    Per variable, a level is chosen with probability proportional to its
    prevalence and its observations are reassigned independently with
    equal probability between the old code and a fresh one, until the
    level count reaches m times the original.  Returns the corrupted
    design and, per variable, the original level each new code descends
    from.
    """
    if m < 1:
        raise ValueError("multiplier must be at least 1")
    rng = np.random.default_rng(seed)
    new_cols = []
    parents = []
    for j in range(design.n_variables):
        codes = design.categorical[j].copy()
        K = design.n_levels[j]
        root = np.arange(K, dtype=np.int64)
        target = m * K
        cur = K
        while cur < target:
            counts = np.bincount(codes, minlength=cur)
            splittable = counts >= 2
            if not splittable.any():
                raise RuntimeError("no level large enough to split")
            probs = np.where(splittable, counts, 0).astype(float)
            pick = rng.choice(cur, p=probs / probs.sum())
            rows = np.nonzero(codes == pick)[0]
            move = rng.random(len(rows)) < 0.5
            if move.all() or not move.any():
                move[rng.integers(len(rows))] = not move[0]
            codes[rows[move]] = cur
            root = np.append(root, root[pick])
            cur += 1
        new_cols.append(codes)
        parents.append(root)
    return (
        Design(new_cols, n_levels=[len(r) for r in parents]),
        parents,
    )
