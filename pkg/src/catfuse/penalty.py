"""Minimax concave penalty and its two-piece extended-quadratic form.

The penalty rho(x) has gradient ``lam`` at zero, curves down quadratically,
and is flat at ``gamma * lam**2 / 2`` for x >= gamma * lam.  The envelope
calculus in :mod:`catfuse.pwq` relies on exactly this two-piece structure:
a concave quadratic on [0, gamma*lam) and a constant beyond.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["McpPenalty"]


@dataclass(frozen=True)
class McpPenalty:
    """Concavity scale ``gamma`` (> 0) and penalty level ``lam`` (>= 0)."""

    gamma: float
    lam: float

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be a positive finite real, got {self.gamma}")
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lam must be a nonnegative finite real, got {self.lam}")

    @property
    def breakpoint(self) -> float:
        """Gap size beyond which the penalty saturates (gamma * lam)."""
        return self.gamma * self.lam

    @property
    def saturation(self) -> float:
        """Penalty value on the flat part (gamma * lam**2 / 2)."""
        return 0.5 * self.gamma * self.lam * self.lam

    def value(self, x):
        """Evaluate the penalty at nonnegative ``x`` (scalar or array).

        Closed form: lam*x - x^2/(2*gamma) below the breakpoint, constant
        saturation above.  Negative inputs raise ``ValueError``.
        """
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0):
            raise ValueError("penalty is only defined for nonnegative gaps")
        out = np.where(
            arr < self.breakpoint,
            self.lam * arr - arr * arr / (2.0 * self.gamma),
            self.saturation,
        )
        if np.isscalar(x) or arr.ndim == 0:
            return float(out)
        return out

    def pieces(self):
        """Interval-restricted quadratics whose pointwise min is the penalty.

        Returns ``(piece1, piece2)``: piece1 is the concave quadratic on
        [0, breakpoint), or ``None`` when lam == 0 (empty interval rather
        than a degenerate one); piece2 is the constant saturation on
        [breakpoint, +inf).  Each piece is a :class:`catfuse.pwq.QuadraticPiece`.
        """
        from .pwq import QuadraticPiece

        piece2 = QuadraticPiece(0.0, 0.0, self.saturation, self.breakpoint, np.inf)
        if self.breakpoint == 0.0:
            return None, piece2
        piece1 = QuadraticPiece(
            -1.0 / (2.0 * self.gamma), self.lam, 0.0, 0.0, self.breakpoint
        )
        return piece1, piece2
