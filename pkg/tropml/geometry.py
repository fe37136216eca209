"""Tropical polytope geometry: membership, enclosing balls and volumes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .const import CHAIN_MEMBERSHIP_TOL, DEFAULT_BURNIN, EQUAL_TOL, LOGGER, MEMBERSHIP_TOL
from .core import TropicalPolytope, as_point, as_points, hull_gap, normalize_point
from .exceptions import (
    BadDimensionError,
    DimensionMismatchError,
    InvalidParameterError,
    InvalidRadiusError,
    StartOutsideBallError,
)
from .sampler import ChainConfig, HarMethod, run_chain


@dataclass(frozen=True, eq=False)
class TropicalBall:
    """The set of points within tropical distance radius of center."""

    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", normalize_point(self.center))
        if self.radius < 0:
            raise InvalidRadiusError(f"radius must be non-negative, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class VolumeEstimate:
    """Monte Carlo volume of a polytope measured against its enclosing ball."""

    proportion: float
    ball_volume: float
    estimate: float
    samples: int
    chain_steps: int
    seed: int

    @property
    def stderr_binomial(self) -> float:
        """Binomial standard error of the estimate."""
        p = self.proportion
        return self.ball_volume * math.sqrt(p * (1.0 - p) / self.samples)


def polytope_contains(
    P: TropicalPolytope | np.ndarray, x, tol: float = MEMBERSHIP_TOL
) -> bool:
    """Return whether x lies in the hull of P, up to tol."""
    polytope = TropicalPolytope.coerce(P)
    point = as_point(x)
    if point.size != polytope.dimension:
        raise DimensionMismatchError(
            f"point has {point.size} coordinates, polytope has {polytope.dimension}"
        )
    return hull_gap(polytope.generators, point) <= tol


def contains_many(
    P: TropicalPolytope | np.ndarray, X, tol: float = MEMBERSHIP_TOL
) -> np.ndarray:
    """Return a boolean mask of the rows of X lying in the hull of P."""
    polytope = TropicalPolytope.coerce(P)
    points = as_points(X)
    if points.shape[1] != polytope.dimension:
        raise DimensionMismatchError(
            f"points have {points.shape[1]} coordinates, polytope has {polytope.dimension}"
        )
    mask = np.empty(points.shape[0], dtype=bool)
    chunk = 100_000
    for start in range(0, points.shape[0], chunk):
        mask[start:start + chunk] = hull_gap(polytope.generators, points[start:start + chunk]) <= tol
    return mask


def max_cycle_mean(M: np.ndarray) -> float:
    """Return the maximum cycle mean of the complete digraph weighted by M.

    Karp's recurrence over walks from node 0; the graph is complete, so every
    node is reachable.
    """
    n = M.shape[0]
    walks = np.full((n + 1, n), -np.inf)
    walks[0, 0] = 0.0
    for k in range(1, n + 1):
        walks[k] = (walks[k - 1][:, None] + M).max(axis=0)
    best = -np.inf
    for v in range(n):
        if not np.isfinite(walks[n, v]):
            continue
        ratios = [
            (walks[n, v] - walks[k, v]) / (n - k)
            for k in range(n)
            if np.isfinite(walks[k, v])
        ]
        best = max(best, min(ratios))
    return float(best)


def _kleene_plus(A: np.ndarray) -> np.ndarray:
    """Max-plus transitive closure of A (no positive cycles)."""
    closure = A.copy()
    for k in range(A.shape[0]):
        closure = np.maximum(closure, closure[:, k:k + 1] + closure[k:k + 1, :])
    return closure


def min_enclosing_ball(V: TropicalPolytope | np.ndarray, tol: float = EQUAL_TOL) -> TropicalBall:
    """Return the smallest tropical ball containing every generator of V.

    The radius is the maximum cycle mean of M[j, k] = max_i(V[i, j] - V[i, k]),
    and the centre is the column of the Kleene star of M - radius at the
    smallest critical node.
    """
    polytope = TropicalPolytope.coerce(V)
    points = polytope.generators
    if polytope.size == 1:
        return TropicalBall(points[0].copy(), 0.0)
    M = (points[:, :, None] - points[:, None, :]).max(axis=0)
    radius = max(max_cycle_mean(M), 0.0)
    plus = _kleene_plus(M - radius)
    critical = np.flatnonzero(np.abs(np.diag(plus)) <= tol * max(1.0, radius))
    node = int(critical[0]) if critical.size else int(np.argmax(np.diag(plus)))
    column = plus[:, node].copy()
    column[node] = max(column[node], 0.0)
    ball = TropicalBall(column, radius)
    worst = max_distance_from(points, ball.center)
    if worst > radius + tol * max(1.0, radius):
        LOGGER.warning("Ball misses a point by %s", worst - radius)
    LOGGER.debug("Enclosing ball centre %s radius %s", ball.center, radius)
    return ball


def max_distance_from(points: np.ndarray, center: np.ndarray) -> float:
    """Return the largest tropical distance from center to a row of points."""
    diff = points - center[None, :]
    return float((diff.max(axis=1) - diff.min(axis=1)).max())


def ball_generators(B: TropicalBall) -> TropicalPolytope:
    """Return the e generators center + radius * e_i of the ball."""
    e = B.center.size
    return TropicalPolytope(B.center[None, :] + B.radius * np.eye(e))


def ball_volume(e: int, radius: float) -> float:
    """Return the Euclidean volume e * r^(e-1) of a tropical ball in the canonical chart."""
    if e < 2:
        raise BadDimensionError(f"a ball needs at least 2 coordinates, got {e}")
    if radius < 0:
        raise InvalidRadiusError(f"radius must be non-negative, got {radius}")
    return float(e * radius ** (e - 1))


def estimate_volume(
    B_gens: TropicalPolytope | np.ndarray,
    P: TropicalPolytope | np.ndarray,
    x0,
    samples: int,
    chain_steps: int,
    radius: float,
    seed: int,
    tol: float = MEMBERSHIP_TOL,
    burnin: float = DEFAULT_BURNIN,
    method: HarMethod = HarMethod.CHORD,
) -> VolumeEstimate:
    """Estimate the volume of P from a uniform chain inside its enclosing ball.

    Args:
        B_gens: Generators of the enclosing ball.
        P: The polytope to measure.
        x0: Chain start, inside the ball.
        samples: Number of counted chain states.
        chain_steps: Transitions between counted states.
        radius: Radius of the ball.
        seed: Seed of the chain.
        tol: Membership tolerance when counting.
        burnin: Fraction of extra leading states discarded.
        method: Step of the chain; chords keep the chain uniform on the ball.

    Returns:
        The proportion of states in P, the ball volume and their product.

    """
    ball = TropicalPolytope.coerce(B_gens)
    polytope = TropicalPolytope.coerce(P)
    if samples < 1 or chain_steps < 1:
        raise InvalidParameterError("samples and chain_steps must be at least 1")
    start = normalize_point(x0)
    if start.size != ball.dimension or polytope.dimension != ball.dimension:
        raise DimensionMismatchError("ball, polytope and start differ in dimension")
    if hull_gap(ball.generators, start) > CHAIN_MEMBERSHIP_TOL:
        raise StartOutsideBallError("start point is outside the enclosing ball")

    discard = math.ceil(burnin * samples)
    config = ChainConfig(intermediate_steps=chain_steps, seed=seed, tol=tol, method=method)
    states = run_chain(ball, start, samples + discard, config)[discard:]
    hits = int(contains_many(polytope, states, tol).sum())
    proportion = hits / samples
    volume = ball_volume(ball.dimension, radius)
    LOGGER.info(
        "Volume estimate %s from %s of %s states", proportion * volume, hits, samples
    )
    return VolumeEstimate(
        proportion=proportion,
        ball_volume=volume,
        estimate=proportion * volume,
        samples=samples,
        chain_steps=chain_steps,
        seed=seed,
    )
