"""catfuse: regression with automatic fusion of categorical levels.

Fits linear and logistic models in which the coefficients of each
categorical variable are clustered by a concave penalty on the gaps
between their order statistics, solved exactly per variable by a
piecewise-quadratic dynamic program inside block coordinate descent.
"""

from .penalty import McpPenalty
from .pwq import (
    Candidate,
    PiecewiseLinear,
    PiecewiseQuadratic,
    QuadraticPiece,
    add_quadratic,
    candidates_from,
    evaluate,
    global_minimize,
    lower_envelope,
)
from .univariate import (
    UnivariateSolution,
    WeightedMeans,
    cluster_ids,
    collapse_to_subaverages,
    objective_value,
    solve_discrete,
    solve_exact,
)

__version__ = "0.1.0"

__all__ = [
    "McpPenalty",
    "QuadraticPiece",
    "PiecewiseQuadratic",
    "PiecewiseLinear",
    "Candidate",
    "evaluate",
    "global_minimize",
    "candidates_from",
    "lower_envelope",
    "add_quadratic",
    "WeightedMeans",
    "UnivariateSolution",
    "collapse_to_subaverages",
    "objective_value",
    "solve_exact",
    "solve_discrete",
    "cluster_ids",
    "__version__",
]
