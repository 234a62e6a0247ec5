"""Multivariate design and coefficient containers.

A design holds per-variable level codes (dense, 0-based) for the
categorical covariates, an optional centred matrix of continuous
covariates, and an optional hierarchy declaring that the levels of the
second categorical variable subdivide those of the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Design", "Coefficients"]


class Design:
    """Observations for fitting: categorical level codes plus continuous
    columns.

    Parameters
    ----------
    categorical : sequence of int arrays
        One array of level codes per variable, codes in 0..K_j-1.
    n_levels : sequence of int, optional
        Level counts K_j; inferred as max code + 1 when omitted.
    continuous : (n, d) array, optional
        Continuous covariates; centred copies are stored.
    labels : list of list, optional
        Original level labels per variable, index = code.
    hierarchy : list of list of int, optional
        Partition of variable 2's levels by variable 1's levels:
        ``hierarchy[k]`` lists the child codes subdividing parent level k.
        Requires exactly two categorical variables and is validated row
        by row at construction.
    """

    def __init__(
        self,
        categorical,
        n_levels=None,
        continuous=None,
        labels=None,
        hierarchy=None,
    ):
        self.categorical = [np.ascontiguousarray(x, dtype=np.int64) for x in categorical]
        if not self.categorical:
            raise ValueError("need at least one categorical variable")
        n = len(self.categorical[0])
        if any(len(x) != n for x in self.categorical):
            raise ValueError("all categorical columns must have equal length")
        if n_levels is None:
            n_levels = [int(x.max()) + 1 for x in self.categorical]
        self.n_levels = [int(k) for k in n_levels]
        for x, k in zip(self.categorical, self.n_levels):
            if x.min() < 0 or x.max() >= k:
                raise ValueError("level codes out of range")
            counts = np.bincount(x, minlength=k)
            if np.any(counts == 0):
                raise ValueError(
                    f"levels with no observations: {np.nonzero(counts == 0)[0].tolist()}"
                )
        self.n = n
        self.labels = labels
        if continuous is not None:
            Z = np.atleast_2d(np.asarray(continuous, dtype=float))
            if Z.shape[0] != n:
                raise ValueError("continuous matrix row count mismatch")
            self.continuous_means = Z.mean(axis=0)
            self.continuous = Z - self.continuous_means
        else:
            self.continuous = None
            self.continuous_means = None
        self.hierarchy = None
        if hierarchy is not None:
            if len(self.categorical) != 2:
                raise ValueError("hierarchy requires exactly two categorical variables")
            if len(hierarchy) != self.n_levels[0]:
                raise ValueError("hierarchy must have one child group per parent level")
            seen = np.full(self.n_levels[1], -1, dtype=np.int64)
            for k, group in enumerate(hierarchy):
                for l in group:
                    if seen[l] != -1:
                        raise ValueError(f"child level {l} assigned to two parents")
                    seen[l] = k
            if np.any(seen == -1):
                raise ValueError("hierarchy must partition all child levels")
            parent_of = seen
            x1, x2 = self.categorical
            if not np.all(x1 == parent_of[x2]):
                bad = int(np.nonzero(x1 != parent_of[x2])[0][0])
                raise ValueError(
                    f"row {bad}: child level {x2[bad]} occurs under parent "
                    f"{x1[bad]}, expected {parent_of[x2[bad]]}"
                )
            self.hierarchy = [np.sort(np.asarray(g, dtype=np.int64)) for g in hierarchy]

    @property
    def n_variables(self) -> int:
        return len(self.categorical)

    @property
    def n_continuous(self) -> int:
        return 0 if self.continuous is None else self.continuous.shape[1]

    def level_counts(self, j: int) -> np.ndarray:
        """Observation counts n_jk for variable j."""
        return np.bincount(self.categorical[j], minlength=self.n_levels[j])


@dataclass
class Coefficients:
    """Fitted intercept, per-variable level coefficients, and continuous
    coefficients.  Each theta[j] satisfies sum_k n_jk * theta[j][k] = 0."""

    mu: float
    theta: list[np.ndarray]
    beta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def zeros(cls, design: Design) -> "Coefficients":
        return cls(
            mu=0.0,
            theta=[np.zeros(k) for k in design.n_levels],
            beta=np.zeros(design.n_continuous),
        )

    def copy(self) -> "Coefficients":
        return Coefficients(
            mu=self.mu,
            theta=[t.copy() for t in self.theta],
            beta=self.beta.copy(),
        )

    def linear_predictor(self, design: Design) -> np.ndarray:
        eta = np.full(design.n, self.mu)
        for j, codes in enumerate(design.categorical):
            eta += self.theta[j][codes]
        if design.continuous is not None and len(self.beta):
            eta += design.continuous @ self.beta
        return eta

    def max_abs_diff(self, other: "Coefficients") -> float:
        d = abs(self.mu - other.mu)
        for a, b in zip(self.theta, other.theta):
            d = max(d, float(np.max(np.abs(a - b))) if len(a) else 0.0)
        if len(self.beta):
            d = max(d, float(np.max(np.abs(self.beta - other.beta))))
        return d
