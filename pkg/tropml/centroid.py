"""Tropical Fermat-Weber points."""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .const import (
    DEFAULT_FW_MAX_ITERS,
    DEFAULT_FW_MIN_STEP,
    DEFAULT_FW_PATIENCE,
    DEFAULT_FW_STEP_FRACTION,
    DEFAULT_FW_TOL,
    LOGGER,
    LP_DENSE_LIMIT,
)
from .core import TropicalPolytope
from .exceptions import BadDimensionError, InvalidParameterError, SolverFailureError
from .helpers import triangular_root
from .phylo import subdominant_ultrametric


class FWMethod(Enum):
    """Solver that produced a Fermat-Weber point."""

    LP = "lp"
    SUBGRADIENT = "subgradient"
    REGULARIZED = "regularized"


@dataclass(frozen=True, eq=False)
class FermatWeberResult:
    """A Fermat-Weber point and how it was found.

    `objective` is the sum of tropical distances to the data; `penalty` is the
    ultrametric regularization term (zero outside the regularized method).
    """

    point: np.ndarray
    objective: float
    method: FWMethod
    iterations: int
    converged: bool
    penalty: float = 0.0
    trace: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    @property
    def total(self) -> float:
        """Objective plus penalty."""
        return self.objective + self.penalty


@dataclass(frozen=True)
class SubgradientConfig:
    """Step schedule and stopping rule of the subgradient method."""

    max_iters: int = DEFAULT_FW_MAX_ITERS
    patience: int = DEFAULT_FW_PATIENCE
    tol: float = DEFAULT_FW_TOL
    min_step: float = DEFAULT_FW_MIN_STEP
    step_fraction: float = DEFAULT_FW_STEP_FRACTION
    initial_step: float | None = None


@dataclass(frozen=True)
class RegularizedFWConfig(SubgradientConfig):
    """Subgradient settings plus the ultrametric penalty rate."""

    lam: float = 0.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise InvalidParameterError(f"lam must be non-negative, got {self.lam}")


def fw_objective(V: np.ndarray, y: np.ndarray) -> float:
    """Return the sum of tropical distances from y to the rows of V."""
    diff = y[None, :] - V
    return float((diff.max(axis=1) - diff.min(axis=1)).sum())


def _fw_subgradient(V: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sum over rows of e_argmax(y - v) - e_argmin(y - v), lowest index on ties."""
    diff = y[None, :] - V
    e = V.shape[1]
    up = np.bincount(diff.argmax(axis=1), minlength=e)
    down = np.bincount(diff.argmin(axis=1), minlength=e)
    return (up - down).astype(float)


def fermat_weber_lp(V: TropicalPolytope | np.ndarray) -> FermatWeberResult:
    """Compute an exact Fermat-Weber point by linear programming.

    Minimizes the sum of t_i subject to (y_j - y_k) - t_i <= v_ij - v_ik for
    every point i and ordered coordinate pair j != k, with y_0 = 0.
    """
    points = TropicalPolytope.coerce(V).generators
    s, e = points.shape
    if s * e * e > LP_DENSE_LIMIT:
        LOGGER.warning("Linear program with %s constraints may be slow", s * e * (e - 1))

    jj, kk = np.nonzero(~np.eye(e, dtype=bool))
    pairs = jj.size
    rows = np.arange(s * pairs)
    point_of_row = np.repeat(np.arange(s), pairs)
    A_ub = sparse.coo_matrix(
        (
            np.concatenate([np.ones(s * pairs), -np.ones(s * pairs), -np.ones(s * pairs)]),
            (
                np.concatenate([rows, rows, rows]),
                np.concatenate([np.tile(jj, s), np.tile(kk, s), e + point_of_row]),
            ),
        ),
        shape=(s * pairs, e + s),
    ).tocsr()
    b_ub = (points[:, jj] - points[:, kk]).reshape(-1)
    c = np.concatenate([np.zeros(e), np.ones(s)])
    bounds = [(0.0, 0.0)] + [(None, None)] * (e - 1) + [(0.0, None)] * s

    try:
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    except ValueError as err:
        raise SolverFailureError(f"linear program rejected: {err}") from err
    if res.status != 0:
        raise SolverFailureError(f"linear program failed: {res.message}")

    point = res.x[:e] - res.x[0]
    objective = fw_objective(points, point)
    LOGGER.info("LP Fermat-Weber objective %s after %s iterations", objective, res.nit)
    return FermatWeberResult(
        point=point,
        objective=objective,
        method=FWMethod.LP,
        iterations=int(res.nit),
        converged=True,
    )


def _descend(
    V: np.ndarray,
    start: np.ndarray,
    config: SubgradientConfig,
    penalty: Callable[[np.ndarray], tuple[float, np.ndarray | None]] | None = None,
) -> tuple[np.ndarray, float, int, bool, np.ndarray]:
    """Normalized subgradient descent in phases with best-point restarts.

    Each phase restarts from the best point and takes `patience` steps of
    length eta / sqrt(j); eta halves between phases. The run has converged
    when a phase no longer improves the best value and eta is below
    min_step * scale, or when the chosen subgradient vanishes.

    Returns:
        The best point, its total objective, the iteration count, the
        convergence flag and the best-so-far trace.

    """

    def total(y: np.ndarray) -> tuple[float, np.ndarray | None]:
        value = fw_objective(V, y)
        if penalty is None:
            return value, None
        extra, grad = penalty(y)
        return value + extra, grad

    best = start - start[0]
    best_value, _ = total(best)
    diff = best[None, :] - V
    scale = float((diff.max(axis=1) - diff.min(axis=1)).max()) or 1.0
    eta = config.initial_step or config.step_fraction * scale
    iterations, converged = 0, False
    trace = [best_value]

    while iterations < config.max_iters and not converged:
        phase_value = best_value
        y = best.copy()
        _, pen_grad = total(y)
        for j in range(1, config.patience + 1):
            g = _fw_subgradient(V, y)
            if pen_grad is not None:
                g = g + pen_grad
            norm = np.linalg.norm(g)
            if norm == 0:
                converged = True
                break
            y = y - (eta / np.sqrt(j)) * g / norm
            y = y - y[0]
            iterations += 1
            value, pen_grad = total(y)
            if value < best_value:
                best, best_value = y.copy(), value
            trace.append(best_value)
            if iterations >= config.max_iters:
                break
        stalled = phase_value - best_value <= config.tol * max(1.0, abs(best_value))
        if stalled and eta <= config.min_step * scale:
            converged = True
        LOGGER.debug("Phase ended at iteration %s with step %s value %s", iterations, eta, best_value)
        eta /= 2.0

    return best, best_value, iterations, converged, np.asarray(trace)


def fermat_weber_subgradient(
    V: TropicalPolytope | np.ndarray, config: SubgradientConfig | None = None
) -> FermatWeberResult:
    """Approximate a Fermat-Weber point by subgradient descent from the coordinatewise median."""
    config = config or SubgradientConfig()
    points = TropicalPolytope.coerce(V).generators
    start = np.median(points, axis=0)
    point, value, iterations, converged, trace = _descend(points, start, config)
    LOGGER.info(
        "Subgradient Fermat-Weber objective %s after %s iterations (converged=%s)",
        value, iterations, converged,
    )
    return FermatWeberResult(
        point=point,
        objective=value,
        method=FWMethod.SUBGRADIENT,
        iterations=iterations,
        converged=converged,
        trace=trace,
    )


def ultrametric_penalty(omega: np.ndarray, lam: float) -> tuple[float, np.ndarray]:
    """Return lam * ||omega - pi(omega)||^2 and its gradient with pi held fixed."""
    residual = omega - subdominant_ultrametric(omega).values
    return float(lam * residual @ residual), 2.0 * lam * residual


def fermat_weber_regularized(
    V: TropicalPolytope | np.ndarray, config: RegularizedFWConfig | None = None
) -> FermatWeberResult:
    """Fermat-Weber point penalized by its distance to the space of ultrametrics.

    Rows of V are leaf-pair distance vectors, so e must equal m(m-1)/2 with
    m >= 3 leaves. With lam = 0 this is exactly the subgradient method.
    """
    config = config or RegularizedFWConfig()
    points = TropicalPolytope.coerce(V).generators
    m = triangular_root(points.shape[1])
    if m is None or m < 3:
        raise BadDimensionError(
            f"{points.shape[1]} coordinates is not a pair count of 3 or more leaves"
        )
    start = np.median(points, axis=0)
    if config.lam > 0:
        start = subdominant_ultrametric(start).values

        def penalty(y: np.ndarray) -> tuple[float, np.ndarray]:
            return ultrametric_penalty(y, config.lam)
    else:
        penalty = None

    point, value, iterations, converged, trace = _descend(points, start, config, penalty)
    objective = fw_objective(points, point)
    LOGGER.info(
        "Regularized Fermat-Weber objective %s penalty %s after %s iterations",
        objective, value - objective, iterations,
    )
    return FermatWeberResult(
        point=point,
        objective=objective,
        method=FWMethod.REGULARIZED,
        iterations=iterations,
        converged=converged,
        penalty=ultrametric_penalty(point, config.lam)[0] if config.lam > 0 else 0.0,
        trace=trace,
    )
