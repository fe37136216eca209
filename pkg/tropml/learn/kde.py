"""Tropical kernel density estimation with nearest-neighbour bandwidths."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..const import BANDWIDTH_FLOOR, DEFAULT_KDE_MULTIPLIER, LOGGER
from ..core import as_points, pairwise_distances
from ..exceptions import DimensionMismatchError, InvalidParameterError, TooFewPointsError

# Distances at or below this mark a query as a copy of a training row.
_SELF_MATCH = 1e-12


@dataclass(frozen=True, eq=False)
class KdeModel:
    """Training points with one Laplacian bandwidth each."""

    points: np.ndarray
    bandwidths: np.ndarray
    multiplier: float

    def __post_init__(self) -> None:
        points = as_points(self.points)
        bandwidths = np.asarray(self.bandwidths, dtype=float).reshape(-1)
        if bandwidths.size != points.shape[0]:
            raise DimensionMismatchError("one bandwidth per point is required")
        if not np.all(bandwidths > 0):
            raise InvalidParameterError("bandwidths must be positive")
        object.__setattr__(self, "points", points - points[:, :1])
        object.__setattr__(self, "bandwidths", bandwidths)


def _nearest_other(D: np.ndarray) -> np.ndarray:
    masked = D.copy()
    np.fill_diagonal(masked, np.inf)
    return masked.min(axis=1)


def kde_fit(X, multiplier: float = DEFAULT_KDE_MULTIPLIER) -> KdeModel:
    """Set each bandwidth to multiplier times the distance to the nearest other row."""
    points = as_points(X)
    if points.shape[0] < 2:
        raise TooFewPointsError("kernel density estimation needs at least 2 points")
    if not multiplier > 0:
        raise InvalidParameterError(f"multiplier must be positive, got {multiplier}")
    nearest = _nearest_other(pairwise_distances(points))
    bandwidths = np.maximum(multiplier * nearest, BANDWIDTH_FLOOR)
    LOGGER.debug("KDE bandwidths range %s to %s", bandwidths.min(), bandwidths.max())
    return KdeModel(points=points, bandwidths=bandwidths, multiplier=multiplier)


def _average_kernels(
    dist: np.ndarray, bandwidths: np.ndarray, holdout_self: bool
) -> np.ndarray:
    kernels = np.exp(-dist / bandwidths)
    total = kernels.sum(axis=1)
    count = np.full(dist.shape[0], dist.shape[1], dtype=float)
    if holdout_self:
        matched = dist <= _SELF_MATCH
        has_match = matched.any(axis=1)
        first = matched.argmax(axis=1)
        rows = np.flatnonzero(has_match)
        total[rows] -= kernels[rows, first[rows]]
        count[rows] -= 1
    return np.divide(total, count, out=np.zeros_like(total), where=count > 0)


def kde_scores(model: KdeModel, queries, holdout_self: bool = False) -> np.ndarray:
    """Return the unnormalized Laplacian-kernel density at each query row.

    Args:
        model: The fitted model.
        queries: M×e query rows.
        holdout_self: Leave out one training row identical to the query.

    Returns:
        M scores, comparable for ranking only.

    """
    Q = as_points(queries)
    if Q.shape[1] != model.points.shape[1]:
        raise DimensionMismatchError(
            f"queries have {Q.shape[1]} coordinates, model has {model.points.shape[1]}"
        )
    dist = pairwise_distances(Q, model.points)
    return _average_kernels(dist, model.bandwidths[None, :], holdout_self)


def kde_outlier_scores(
    reference, candidates, multiplier: float = DEFAULT_KDE_MULTIPLIER
) -> np.ndarray:
    """Score each candidate as if it alone were appended to the reference set.

    Reference bandwidths are recomputed with the candidate included, and the
    candidate's own kernel is left out. Low scores mark outliers.
    """
    R = as_points(reference)
    C = as_points(candidates)
    if C.shape[1] != R.shape[1]:
        raise DimensionMismatchError("candidates and reference differ in dimension")
    if R.shape[0] < 1:
        raise TooFewPointsError("reference set is empty")
    nearest = (
        _nearest_other(pairwise_distances(R)) if R.shape[0] > 1 else np.full(1, np.inf)
    )
    dist = pairwise_distances(C, R)
    bandwidths = np.maximum(multiplier * np.minimum(nearest[None, :], dist), BANDWIDTH_FLOOR)
    return _average_kernels(dist, bandwidths, holdout_self=False)
