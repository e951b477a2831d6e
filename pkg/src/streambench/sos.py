"""Stochastic outlier selection over a window of 2-D points.

Pipeline: squared-Euclidean dissimilarities -> per-point Gaussian
affinities whose variance is chosen by bisection so the binding
distribution's perplexity matches the configured target -> binding
probabilities by row normalization -> outlier probability
phi(i) = prod_{j != i} (1 - b_{ji}).

This is the production path, vectorized over all points at once; the
validator carries its own scalar brute-force implementation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindow

# fixed bisection bracket on log2(variance); wide enough for any
# squared distance the sensor value ranges can produce
_LOG2_VAR_LO = -100.0
_LOG2_VAR_HI = 100.0


@dataclass(frozen=True)
class SosParams:
    perplexity: float = 30.0
    tolerance: float = 1e-5
    max_iter: int = 100

    def __post_init__(self):
        if self.perplexity <= 1.0:
            raise ValueError("perplexity must be > 1")
        if self.tolerance <= 0 or self.max_iter < 1:
            raise ValueError("bad bisection settings")


def _binding_perplexities(dist2: np.ndarray, log2_var: np.ndarray):
    """Row-normalized binding matrix and per-row perplexity 2**H."""
    n = dist2.shape[0]
    variance = np.exp2(log2_var)[:, None]
    with np.errstate(under="ignore"):
        affinity = np.exp(-dist2 / (2.0 * variance))
    np.fill_diagonal(affinity, 0.0)
    row_sum = affinity.sum(axis=1, keepdims=True)
    safe = row_sum > 0.0
    binding = np.divide(affinity, row_sum, out=np.zeros_like(affinity), where=safe)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(binding > 0.0, binding * np.log2(binding), 0.0)
    entropy = -plogp.sum(axis=1)
    perplexity = np.where(safe[:, 0], np.exp2(entropy), 1.0)
    return binding, perplexity


def outlier_probabilities(points: np.ndarray, params: SosParams) -> np.ndarray:
    """Outlier probability per point; raises DegenerateWindow when every
    point in a window of more than two is identical."""
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n < 2:
        raise ValueError("need at least two points")
    diff = pts[:, None, :] - pts[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    if n > 2 and not np.any(dist2 > 0.0):
        raise DegenerateWindow("all points in the window are identical")

    lo = np.full(n, _LOG2_VAR_LO)
    hi = np.full(n, _LOG2_VAR_HI)
    for _ in range(params.max_iter):
        if np.max(hi - lo) < params.tolerance:
            break
        mid = 0.5 * (lo + hi)
        _, perplexity = _binding_perplexities(dist2, mid)
        too_wide = perplexity > params.perplexity
        hi = np.where(too_wide, mid, hi)
        lo = np.where(too_wide, lo, mid)

    binding, _ = _binding_perplexities(dist2, 0.5 * (lo + hi))
    return np.prod(1.0 - binding, axis=0)
