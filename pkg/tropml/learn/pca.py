"""Tropical PCA: the best-fit tropical triangle through a data set."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..const import (
    CHAIN_MEMBERSHIP_TOL,
    DEFAULT_PCA_ITERS,
    DEFAULT_PCA_STEPS,
    DEFAULT_SEED,
    LOGGER,
)
from ..core import TropicalPolytope, as_points, hull_gap, project_many
from ..exceptions import BadDimensionError, DimensionMismatchError, TooFewPointsError
from ..helpers import make_rng
from ..sampler import ChainConfig, run_chain

# Corners of the reference triangle: unit circumradius, centred at the origin.
_ANGLES = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
REFERENCE_CORNERS = np.column_stack([np.cos(_ANGLES), np.sin(_ANGLES)])


@dataclass(frozen=True, eq=False)
class PcaTriangle:
    """A tropical triangle, its projection objective and the fit trace."""

    vertices: np.ndarray
    objective: float
    trace: np.ndarray


def pca_objective(vertices: np.ndarray, X: np.ndarray) -> float:
    """Return the sum over rows of d(x, projection of x onto the triangle)."""
    diff = X - project_many(vertices, X)
    return float((diff.max(axis=1) - diff.min(axis=1)).sum())


def fit_tropical_pca(
    X,
    initial=None,
    outer_iters: int = DEFAULT_PCA_ITERS,
    chain_steps: int = DEFAULT_PCA_STEPS,
    seed: int = DEFAULT_SEED,
    region: TropicalPolytope | None = None,
) -> PcaTriangle:
    """Fit the best-fit tropical triangle by vertex hit-and-run.

    Each outer iteration proposes a new position for one vertex (round-robin)
    from a hit-and-run chain over the data hull, or over `region` when given,
    and keeps it only if the objective strictly decreases.

    Args:
        X: N×e data rows, N >= 3.
        initial: 3×e starting triangle; three random data rows when omitted.
        outer_iters: Number of proposals.
        chain_steps: Hit-and-run transitions per proposal.
        seed: Seed of the proposal stream.
        region: Proposal space replacing the data hull.

    Returns:
        The best triangle and the best objective after every iteration.

    """
    points = as_points(X)
    points = points - points[:, :1]
    if points.shape[0] < 3:
        raise TooFewPointsError("tropical PCA needs at least 3 points")
    rng = make_rng(seed)
    if initial is None:
        vertices = points[rng.choice(points.shape[0], size=3, replace=False)].copy()
    else:
        vertices = as_points(initial)
        vertices = vertices - vertices[:, :1]
        if vertices.shape[0] != 3:
            raise BadDimensionError(f"a triangle has 3 vertices, got {vertices.shape[0]}")
        if vertices.shape[1] != points.shape[1]:
            raise DimensionMismatchError("initial triangle and data differ in dimension")

    hull = TropicalPolytope(points) if region is None else TropicalPolytope.coerce(region)
    if hull.dimension != points.shape[1]:
        raise DimensionMismatchError("region and data differ in dimension")
    config = ChainConfig(intermediate_steps=chain_steps, seed=seed)
    best = pca_objective(vertices, points)
    trace = []
    for iteration in range(outer_iters):
        if best == 0:
            LOGGER.debug("Triangle fits the data exactly after %s iterations", iteration)
            break
        k = iteration % 3
        start = vertices[k]
        if hull_gap(hull.generators, start) > CHAIN_MEMBERSHIP_TOL:
            start = hull.generators[0]
        proposal = run_chain(hull, start, 1, config, rng=rng)[0]
        candidate = vertices.copy()
        candidate[k] = proposal
        value = pca_objective(candidate, points)
        if value < best:
            vertices, best = candidate, value
        trace.append(best)
    LOGGER.info("Tropical PCA objective %s after %s proposals", best, len(trace))
    return PcaTriangle(vertices=vertices, objective=best, trace=np.asarray(trace))


def pca_plot_coords(triangle: PcaTriangle, X) -> np.ndarray:
    """Map the projection of each row onto the triangle to the plane.

    With vertices shifted to coordinate sum zero, the projection pi(x) has
    coefficients lambda_l = min_j(pi(x)_j - v_lj). They are recentred to sum
    zero and applied to the corners of an equilateral reference triangle, so
    vertex l lands on corner l.
    """
    points = as_points(X)
    if points.shape[1] != triangle.vertices.shape[1]:
        raise DimensionMismatchError("rows and triangle differ in dimension")
    vertices = triangle.vertices - triangle.vertices.mean(axis=1, keepdims=True)
    projected = project_many(triangle.vertices, points)
    lam = (projected[:, None, :] - vertices[None, :, :]).min(axis=2)
    return (lam - lam.mean(axis=1, keepdims=True)) @ REFERENCE_CORNERS
