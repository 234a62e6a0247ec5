"""Piecewise-quadratic functions on the real line and their lower-envelope
algebra.

These are the data structures behind the exact univariate solver: the
running objective is continuous, coercive and piecewise quadratic, its
inner-minimiser maps are piecewise linear, and each stage is built by
taking the lower envelope of a finite list of interval-restricted
quadratic candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .penalty import McpPenalty

__all__ = [
    "QuadraticPiece",
    "PiecewiseQuadratic",
    "PiecewiseLinear",
    "Candidate",
    "evaluate",
    "global_minimize",
    "candidates_from",
    "lower_envelope",
    "add_quadratic",
]

# Adjacent pieces must agree at shared knots to this relative tolerance.
CONTINUITY_RTOL = 1e-9


@dataclass(frozen=True)
class QuadraticPiece:
    """a*x^2 + b*x + c restricted to the interval [lo, hi)."""

    a: float
    b: float
    c: float
    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and np.isfinite(self.c)):
            raise ValueError("piece coefficients must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi})")

    def __call__(self, x):
        return (self.a * x + self.b) * x + self.c


class PiecewiseQuadratic:
    """Quadratic pieces on disjoint closed-left intervals covering the line.

    Stored as flat arrays ``lo, a, b, c`` with ``lo[0] == -inf``; piece i
    lives on [lo[i], lo[i+1]) and the last piece extends to +inf.
    Evaluation at a knot uses the right-hand piece.
    """

    __slots__ = ("lo", "a", "b", "c")

    def __init__(self, lo, a, b, c, check: bool = True):
        self.lo = np.ascontiguousarray(lo, dtype=float)
        self.a = np.ascontiguousarray(a, dtype=float)
        self.b = np.ascontiguousarray(b, dtype=float)
        self.c = np.ascontiguousarray(c, dtype=float)
        if check:
            self.validate()

    @classmethod
    def from_pieces(cls, pieces: Sequence[QuadraticPiece]) -> "PiecewiseQuadratic":
        pieces = sorted(pieces, key=lambda p: p.lo)
        if not pieces:
            raise ValueError("no pieces")
        if pieces[0].lo != -np.inf or pieces[-1].hi != np.inf:
            raise ValueError("pieces must cover the whole line")
        for left, right in zip(pieces, pieces[1:]):
            if left.hi != right.lo:
                raise ValueError("pieces must tile the line without gaps or overlap")
        return cls(
            [p.lo for p in pieces],
            [p.a for p in pieces],
            [p.b for p in pieces],
            [p.c for p in pieces],
        )

    @classmethod
    def single(cls, a: float, b: float, c: float) -> "PiecewiseQuadratic":
        return cls([-np.inf], [a], [b], [c], check=False)

    def validate(self) -> None:
        if len(self.lo) == 0:
            raise ValueError("no pieces")
        if self.lo[0] != -np.inf:
            raise ValueError("first interval must start at -inf")
        if np.any(np.diff(self.lo) <= 0):
            raise ValueError("interval starts must be strictly increasing")
        for arr in (self.a, self.b, self.c):
            if not np.all(np.isfinite(arr)):
                raise ValueError("coefficients must be finite")
        for i in range(len(self.lo) - 1):
            x = self.lo[i + 1]
            left = (self.a[i] * x + self.b[i]) * x + self.c[i]
            right = (self.a[i + 1] * x + self.b[i + 1]) * x + self.c[i + 1]
            if abs(left - right) > CONTINUITY_RTOL * (1.0 + abs(left) + abs(right)):
                raise ValueError(f"discontinuity at knot {x}: {left} vs {right}")

    @property
    def piece_count(self) -> int:
        return len(self.lo)

    def pieces(self) -> list[QuadraticPiece]:
        his = np.append(self.lo[1:], np.inf)
        return [
            QuadraticPiece(self.a[i], self.b[i], self.c[i], self.lo[i], his[i])
            for i in range(len(self.lo))
        ]

    def piece_index(self, x):
        return np.clip(np.searchsorted(self.lo, x, side="right") - 1, 0, None)

    def __call__(self, x):
        i = self.piece_index(x)
        out = (self.a[i] * np.asarray(x, dtype=float) + self.b[i]) * x + self.c[i]
        if np.isscalar(x):
            return float(out)
        return out

    def dump(self) -> str:
        """One piece per line: lo, hi, a, b, c (17 significant digits)."""
        his = np.append(self.lo[1:], np.inf)
        lines = [
            "%.17g %.17g %.17g %.17g %.17g"
            % (self.lo[i], his[i], self.a[i], self.b[i], self.c[i])
            for i in range(len(self.lo))
        ]
        return "\n".join(lines)


class PiecewiseLinear:
    """Linear pieces on disjoint closed-left intervals covering the line."""

    __slots__ = ("lo", "slope", "intercept")

    def __init__(self, lo, slope, intercept):
        self.lo = np.ascontiguousarray(lo, dtype=float)
        self.slope = np.ascontiguousarray(slope, dtype=float)
        self.intercept = np.ascontiguousarray(intercept, dtype=float)
        if len(self.lo) == 0 or self.lo[0] != -np.inf:
            raise ValueError("first interval must start at -inf")
        if np.any(np.diff(self.lo) <= 0):
            raise ValueError("interval starts must be strictly increasing")

    @property
    def piece_count(self) -> int:
        return len(self.lo)

    def __call__(self, x):
        i = np.clip(np.searchsorted(self.lo, x, side="right") - 1, 0, None)
        out = self.slope[i] * np.asarray(x, dtype=float) + self.intercept[i]
        if np.isscalar(x):
            return float(out)
        return out


@dataclass(frozen=True)
class Candidate:
    """An interval-restricted quadratic plus the linear map recovering the
    inner minimiser from the point at which the candidate is evaluated."""

    quad: QuadraticPiece
    back_slope: float
    back_intercept: float

    def back(self, x):
        return self.back_slope * x + self.back_intercept


def evaluate(f: PiecewiseQuadratic, x):
    """Value of the unique piece containing x (right-hand piece at knots)."""
    return f(x)


def global_minimize(f: PiecewiseQuadratic) -> tuple[float, float]:
    """Smallest global minimiser of a coercive piecewise quadratic and its
    value; raises ``ValueError`` if the function is not coercive."""
    x, v = _kernels._minimize(f.lo, f.a, f.b, f.c)
    return float(x), float(v)


def candidates_from(f: PiecewiseQuadratic, pen: McpPenalty) -> list[Candidate]:
    """Candidate minimiser functions of one DP stage.

    The pointwise minimum of the returned candidates at x equals
    ``min_{t <= x} f(t) + pen.value(x - t)``; each candidate's backpointer
    recovers the minimising t.
    """
    clo, chi, ca, cb, cc, cbs, cbi = _kernels._candidates(
        f.lo, f.a, f.b, f.c, pen.gamma, pen.lam
    )
    return [
        Candidate(
            QuadraticPiece(ca[i], cb[i], cc[i], clo[i], chi[i]),
            float(cbs[i]),
            float(cbi[i]),
        )
        for i in range(len(clo))
    ]


def _candidate_arrays(cands: Iterable[Candidate]):
    cands = list(cands)
    n = len(cands)
    clo = np.empty(n)
    chi = np.empty(n)
    ca = np.empty(n)
    cb = np.empty(n)
    cc = np.empty(n)
    cbs = np.empty(n)
    cbi = np.empty(n)
    for i, cand in enumerate(cands):
        clo[i] = cand.quad.lo
        chi[i] = cand.quad.hi
        ca[i] = cand.quad.a
        cb[i] = cand.quad.b
        cc[i] = cand.quad.c
        cbs[i] = cand.back_slope
        cbi[i] = cand.back_intercept
    return clo, chi, ca, cb, cc, cbs, cbi


def lower_envelope(
    cands: Sequence[Candidate],
) -> tuple[PiecewiseQuadratic, PiecewiseLinear]:
    """Pointwise minimum of the candidates (out-of-interval values are
    treated as +inf) together with the winning backpointer at each point.

    The knot walk sweeps left to right over endpoint events and pairwise
    intersections; ties are resolved by comparing values, then first and
    second derivatives, then the lowest candidate index.
    """
    if len(cands) == 0:
        raise ValueError("lower envelope of an empty candidate list")
    glo, ga, gb, gc, gbs, gbi = _kernels._envelope(*_candidate_arrays(cands))
    env = PiecewiseQuadratic(glo, ga, gb, gc)
    back = PiecewiseLinear(glo.copy(), gbs, gbi)
    return env, back


def add_quadratic(g: PiecewiseQuadratic, w: float, ybar: float) -> PiecewiseQuadratic:
    """g(x) + 0.5 * w * (ybar - x)^2 on the same intervals (w > 0)."""
    if not w > 0:
        raise ValueError("weight must be positive")
    return PiecewiseQuadratic(
        g.lo.copy(),
        g.a + 0.5 * w,
        g.b - w * ybar,
        g.c + 0.5 * w * ybar * ybar,
        check=False,
    )
