"""Tropical logistic regression between two class centroids."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import expit

from ..centroid import (
    RegularizedFWConfig,
    SubgradientConfig,
    fermat_weber_regularized,
    fermat_weber_subgradient,
)
from ..const import DEFAULT_SEED, LINK_SCALE_BOUNDS, LOGGER
from ..core import as_point, as_points, normalize_point, pairwise_distances
from ..exceptions import (
    DimensionMismatchError,
    InputError,
    InvalidParameterError,
    SingleClassError,
)


@dataclass(frozen=True)
class TrainMeta:
    """Training-set facts kept with a model."""

    counts: tuple[int, int]
    seed: int = DEFAULT_SEED


@dataclass(frozen=True, eq=False)
class LogisticModel:
    """Class centroids omega0 and omega1 with a fitted link scale.

    The probability of class 1 is sigmoid(scale * (d(x, omega0) - d(x, omega1))).
    """

    omega0: np.ndarray
    omega1: np.ndarray
    scale: float
    penalty: float
    train_meta: TrainMeta

    def __post_init__(self) -> None:
        omega0, omega1 = normalize_point(self.omega0), normalize_point(self.omega1)
        if omega0.size != omega1.size:
            raise DimensionMismatchError("centroids differ in dimension")
        if not self.scale > 0:
            raise InvalidParameterError(f"scale must be positive, got {self.scale}")
        object.__setattr__(self, "omega0", omega0)
        object.__setattr__(self, "omega1", omega1)

    def distance_gap(self, X) -> np.ndarray:
        """Return d(x, omega0) - d(x, omega1) for every row."""
        points = as_points(X)
        if points.shape[1] != self.omega0.size:
            raise DimensionMismatchError(
                f"rows have {points.shape[1]} coordinates, model has {self.omega0.size}"
            )
        centroids = np.vstack([self.omega0, self.omega1])
        dist = pairwise_distances(points, centroids)
        return dist[:, 0] - dist[:, 1]

    def predict_proba(self, X) -> np.ndarray:
        """Return the class-1 probability of every row."""
        return expit(self.scale * self.distance_gap(X))

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        """Return 0/1 class predictions."""
        return (self.predict_proba(X) > threshold).astype(int)


def _check_labels(y, rows: int) -> np.ndarray:
    labels = np.asarray(y).reshape(-1)
    if labels.size != rows:
        raise DimensionMismatchError(f"{labels.size} labels for {rows} rows")
    if not np.all(np.isin(labels, (0, 1))):
        raise InputError("labels must be 0 or 1")
    labels = labels.astype(int)
    if np.unique(labels).size < 2:
        raise SingleClassError("both classes must be present")
    return labels


def fit_link_scale(gap: np.ndarray, y: np.ndarray) -> float:
    """Maximize the Bernoulli likelihood over the link scale on a log grid.

    The loss depends on labels only through sign * gap, so relabelling the
    classes leaves the fitted scale unchanged.
    """
    signed = np.where(y == 1, 1.0, -1.0) * gap
    if not np.any(signed):
        return 1.0

    def loss(log_scale: float) -> float:
        return float(np.logaddexp(0.0, -np.exp(log_scale) * signed).sum())

    low, high = np.log(LINK_SCALE_BOUNDS[0]), np.log(LINK_SCALE_BOUNDS[1])
    res = minimize_scalar(loss, bounds=(low, high), method="bounded")
    return float(np.exp(res.x))


def fit_logistic(
    X,
    y,
    penalty: float = 0.0,
    config: SubgradientConfig | None = None,
    seed: int = DEFAULT_SEED,
) -> LogisticModel:
    """Fit tropical logistic regression.

    Args:
        X: N×e training rows.
        y: 0/1 labels.
        penalty: Ultrametric regularization rate of the class centroids;
            zero uses the plain subgradient Fermat-Weber point.
        config: Step schedule of the centroid solver.
        seed: Recorded in the model metadata.

    Returns:
        The fitted model.

    """
    if penalty < 0:
        raise InvalidParameterError(f"penalty must be non-negative, got {penalty}")
    points = as_points(X)
    points = points - points[:, :1]
    labels = _check_labels(y, points.shape[0])
    config = config or SubgradientConfig()

    centroids = []
    for cls in (0, 1):
        rows = points[labels == cls]
        if penalty > 0:
            reg = RegularizedFWConfig(**{**config.__dict__, "lam": penalty})
            result = fermat_weber_regularized(rows, reg)
        else:
            result = fermat_weber_subgradient(rows, config)
        centroids.append(result.point)

    centroid_gap = pairwise_distances(points, np.vstack(centroids))
    scale = fit_link_scale(centroid_gap[:, 0] - centroid_gap[:, 1], labels)
    counts = (int((labels == 0).sum()), int((labels == 1).sum()))
    LOGGER.info("Fitted logistic model on %s rows with scale %s", points.shape[0], scale)
    return LogisticModel(
        omega0=centroids[0],
        omega1=centroids[1],
        scale=scale,
        penalty=float(penalty),
        train_meta=TrainMeta(counts=counts, seed=seed),
    )


def predict_prob(model: LogisticModel, x) -> float:
    """Return the class-1 probability of one point."""
    return float(model.predict_proba(as_point(x)[None, :])[0])


def predict_proba(model: LogisticModel, X) -> np.ndarray:
    """Return the class-1 probability of every row of X."""
    return model.predict_proba(X)
