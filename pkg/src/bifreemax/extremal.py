"""Univariate free extremal convolutions and projection-trace identities.

For freely independent self-adjoint elements with distribution functions
F and G, the max of the pair (in the spectral order) has distribution
``(F + G - 1)_+`` and the min has ``min(F + G, 1)``.  Specialized to
projections this gives the trace of the join/meet of two free projections
from the individual traces alone.
"""

from __future__ import annotations

import numpy as np

from .cdf import (
    EPS_CDF,
    UnivariateCDF,
    merge_uni_grids,
    require_valid_uni,
)


def free_max_convolve(F: UnivariateCDF, G: UnivariateCDF,
                      eps: float = EPS_CDF) -> UnivariateCDF:
    """Distribution function of the max of two free elements: (F + G - 1)_+."""
    require_valid_uni(F, eps)
    require_valid_uni(G, eps)
    Fm, Gm = merge_uni_grids(F, G)
    return UnivariateCDF(Fm.breaks, np.maximum(0.0, Fm.values + Gm.values - 1.0))


def free_min_convolve(F: UnivariateCDF, G: UnivariateCDF,
                      eps: float = EPS_CDF) -> UnivariateCDF:
    """Distribution function of the min of two free elements: min(F + G, 1)."""
    require_valid_uni(F, eps)
    require_valid_uni(G, eps)
    Fm, Gm = merge_uni_grids(F, G)
    return UnivariateCDF(Fm.breaks, np.minimum(Fm.values + Gm.values, 1.0))


def _check_trace(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def projection_meet_trace(p: float, p2: float) -> float:
    """Trace of the meet of two free projections: (p + p2 - 1)_+."""
    p = _check_trace(p, "p")
    p2 = _check_trace(p2, "p2")
    return max(0.0, p + p2 - 1.0)


def projection_join_trace(p: float, p2: float) -> float:
    """Trace of the join of two free projections: min(p + p2, 1)."""
    p = _check_trace(p, "p")
    p2 = _check_trace(p2, "p2")
    return min(p + p2, 1.0)
