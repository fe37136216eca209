"""Hit-and-run samplers over tropical segments and tropical polytopes."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .const import (
    CHAIN_MEMBERSHIP_TOL,
    DEFAULT_BRACKET_DOUBLINGS,
    DEFAULT_DENSITY_CELLS,
    DEFAULT_INTERMEDIATE_STEPS,
    DEFAULT_MAX_RETRIES,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DENSITY_WINDOW_SIGMAS,
    LOGGER,
)
from .core import (
    TropicalPolytope,
    TropicalSegment,
    as_point,
    hull_gap,
    normalize_point,
    pairwise_distances,
    project_onto_polytope,
    trop_linear_combination,
    trop_segment,
)
from .exceptions import (
    DegenerateDirectionError,
    DimensionMismatchError,
    InvalidParameterError,
    StartOutsideHullError,
)
from .helpers import make_rng


class HarMethod(Enum):
    """How a transition picks the line it samples on."""

    EXTRAPOLATION = "extrapolation"
    CHORD = "chord"


@dataclass(frozen=True)
class ChainConfig:
    """Settings shared by every transition of a chain.

    EXTRAPOLATION walks the tropical segment to a random hull point with
    both end legs extended to the boundary. CHORD walks the straight chord
    through the state along the direction of a random segment leg.
    """

    intermediate_steps: int = DEFAULT_INTERMEDIATE_STEPS
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    max_retries: int = DEFAULT_MAX_RETRIES
    method: HarMethod = HarMethod.EXTRAPOLATION

    def __post_init__(self) -> None:
        if self.intermediate_steps < 1:
            raise InvalidParameterError("intermediate_steps must be at least 1")
        if self.tol < 0:
            raise InvalidParameterError("tol must be non-negative")
        try:
            object.__setattr__(self, "method", HarMethod(self.method))
        except ValueError as err:
            raise InvalidParameterError(f"unknown step method {self.method!r}") from err


@dataclass(frozen=True, eq=False)
class CenterTarget:
    """Location mu and scale sigma of the centred sampler."""

    mu: np.ndarray
    sigma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", normalize_point(self.mu))
        if not self.sigma > 0:
            raise InvalidParameterError(f"sigma must be positive, got {self.sigma}")


def _uniform_on(segment: TropicalSegment, rng: np.random.Generator) -> np.ndarray:
    if segment.length == 0:
        return segment.source.copy()
    return segment.point_at(rng.random() * segment.length)


def _tropical_positions(segment: TropicalSegment) -> np.ndarray:
    """Cumulative tropical length at each bend."""
    steps = np.diff(segment.bends, axis=0)
    if steps.size == 0:
        return np.zeros(1)
    return np.concatenate(([0.0], np.cumsum(steps.max(axis=1) - steps.min(axis=1))))


def _arc_position(segment: TropicalSegment, point: np.ndarray, tol: float) -> float | None:
    """Return the arc length of point along the segment, None when it is off the path."""
    best_s, best_gap = 0.0, np.inf
    for k, (start, end) in enumerate(segment.legs()):
        step = end - start
        width2 = float(step @ step)
        frac = 0.0 if width2 == 0 else float(np.clip((point - start) @ step / width2, 0.0, 1.0))
        gap = float(np.abs(start + frac * step - point).max())
        if gap < best_gap:
            best_s, best_gap = segment.cumulative[k] + frac * np.sqrt(width2), gap
    return float(best_s) if best_gap <= tol else None


def _projection_interval(
    segment: TropicalSegment, mu: np.ndarray, cells: int
) -> tuple[float, float]:
    """Return the tropical-length range of the points of the segment nearest to mu."""
    tcum = _tropical_positions(segment)
    total = float(tcum[-1])
    candidates = [np.linspace(0.0, total, cells + 1), tcum]
    nearest = project_onto_polytope(np.vstack([segment.source, segment.target]), mu)
    s = _arc_position(segment, nearest, DEFAULT_TOL * max(1.0, total))
    if s is not None:
        candidates.append(np.array([np.interp(s, segment.cumulative, tcum)]))
    t = np.concatenate(candidates)
    points = segment.point_at(np.interp(t, tcum, segment.cumulative))
    dist = pairwise_distances(points, mu[None, :])[:, 0]
    best = dist.min()
    near = t[dist <= best + DEFAULT_TOL * max(1.0, best)]
    return float(near.min()), float(near.max())


def _centered_on(
    segment: TropicalSegment,
    target: CenterTarget,
    rng: np.random.Generator,
    cells: int = DEFAULT_DENSITY_CELLS,
) -> np.ndarray:
    """Draw with density exp(-d^2 / (2 sigma^2)) in tropical length around a projection of mu.

    Along a tropical segment the tropical distance between two points is
    the difference of their tropical positions, so d(draw, anchor) is
    half-normal up to truncation at the ends.
    """
    if segment.length == 0:
        return segment.source.copy()
    tcum = _tropical_positions(segment)
    low, high = _projection_interval(segment, target.mu, cells)
    anchor = low + rng.random() * (high - low)

    window = DENSITY_WINDOW_SIGMAS * target.sigma
    edges = np.linspace(max(0.0, anchor - window), min(tcum[-1], anchor + window), cells + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    logw = -((mids - anchor) ** 2) / (2.0 * target.sigma**2)
    cdf = np.cumsum(np.exp(logw - logw.max()))
    cell = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), cells - 1)
    t = edges[cell] + rng.random() * (edges[cell + 1] - edges[cell])
    return segment.point_at(np.interp(t, tcum, segment.cumulative))


def sample_segment_uniform(u, v, rng: np.random.Generator) -> np.ndarray:
    """Draw a point uniformly by Euclidean arc length on the segment between u and v."""
    return _uniform_on(trop_segment(u, v), rng)


def sample_segment_centered(
    u, v, target: CenterTarget, rng: np.random.Generator
) -> np.ndarray:
    """Draw a point on the segment between u and v concentrated near target.mu.

    A projection point p of mu is picked uniformly among the nearest points of
    the segment, and the draw has density proportional to
    exp(-d(x, p)^2 / (2 sigma^2)) with respect to tropical length.
    """
    segment = trop_segment(u, v)
    if target.mu.size != segment.bends.shape[1]:
        raise DimensionMismatchError(
            f"centre has {target.mu.size} coordinates, segment has {segment.bends.shape[1]}"
        )
    return _centered_on(segment, target, rng)


def random_hull_point(P: TropicalPolytope, rng: np.random.Generator) -> np.ndarray:
    """Return a random tropical combination of the generators of P.

    Coefficients are i.i.d. uniform on [-S, 0] with S the generator spread,
    shifted so the largest is zero.
    """
    polytope = TropicalPolytope.coerce(P)
    scale = polytope.spread or 1.0
    coeffs = rng.uniform(-scale, 0.0, size=polytope.size)
    return trop_linear_combination(coeffs - coeffs.max(), polytope.generators)


def _direction(
    polytope: TropicalPolytope, config: ChainConfig, rng: np.random.Generator
) -> np.ndarray:
    """Return a unit direction from a leg of a segment between random hull points."""
    threshold = config.tol * max(1.0, polytope.spread)
    for _ in range(config.max_retries):
        segment = trop_segment(random_hull_point(polytope, rng), random_hull_point(polytope, rng))
        if segment.length <= threshold:
            continue
        s = rng.random() * segment.length
        leg = min(
            int(np.searchsorted(segment.cumulative, s, side="right")) - 1,
            len(segment.bends) - 2,
        )
        step = segment.bends[leg + 1] - segment.bends[leg]
        norm = np.linalg.norm(step)
        if norm > threshold:
            return step / norm
    raise DegenerateDirectionError(
        f"no usable direction after {config.max_retries} attempts"
    )


def _reach(
    V: np.ndarray, x: np.ndarray, direction: np.ndarray, scale: float, tol: float
) -> float:
    """Return how far the hull extends from x along direction."""
    inside, outside = 0.0, scale
    for _ in range(DEFAULT_BRACKET_DOUBLINGS):
        if hull_gap(V, x + outside * direction) > tol:
            break
        inside, outside = outside, 2.0 * outside
    else:
        LOGGER.warning("Boundary not bracketed after %s doublings", DEFAULT_BRACKET_DOUBLINGS)
        return inside
    width = tol * max(1.0, scale)
    while outside - inside > width:
        middle = 0.5 * (inside + outside)
        if hull_gap(V, x + middle * direction) > tol:
            outside = middle
        else:
            inside = middle
    return inside


def _extend(V: np.ndarray, segment: TropicalSegment, scale: float, tol: float) -> TropicalSegment:
    """Extend both end legs of the segment to the boundary of the hull of V.

    The result is again the tropical segment between its new endpoints.
    """
    bends = segment.bends.copy()
    back = bends[0] - bends[1]
    ahead = bends[-1] - bends[-2]
    back /= np.linalg.norm(back)
    ahead /= np.linalg.norm(ahead)
    behind = _reach(V, bends[0], back, scale, tol)
    beyond = _reach(V, bends[-1], ahead, scale, tol)
    bends[0] = bends[0] + behind * back
    bends[-1] = bends[-1] + beyond * ahead
    return TropicalSegment(bends)


def _extended_line(
    polytope: TropicalPolytope,
    pivot: np.ndarray,
    config: ChainConfig,
    rng: np.random.Generator,
) -> TropicalSegment:
    """Segment from pivot to a random hull point, extended at both ends."""
    threshold = config.tol * max(1.0, polytope.spread)
    for _ in range(config.max_retries):
        segment = trop_segment(random_hull_point(polytope, rng), pivot)
        if segment.length > threshold:
            return _extend(polytope.generators, segment, polytope.spread, config.tol)
    raise DegenerateDirectionError(
        f"random hull points matched the state {config.max_retries} times"
    )


def _chord(
    polytope: TropicalPolytope,
    pivot: np.ndarray,
    config: ChainConfig,
    rng: np.random.Generator,
) -> TropicalSegment:
    """Straight chord of the hull through pivot."""
    direction = _direction(polytope, config, rng)
    V = polytope.generators
    backward = _reach(V, pivot, -direction, polytope.spread, config.tol)
    forward = _reach(V, pivot, direction, polytope.spread, config.tol)
    bends = [pivot - backward * direction]
    if backward > 0 and forward > 0:
        bends.append(pivot)
    bends.append(pivot + forward * direction)
    return TropicalSegment(np.vstack(bends))


def _transition(
    polytope: TropicalPolytope,
    x: np.ndarray,
    config: ChainConfig,
    rng: np.random.Generator,
    target: CenterTarget | None,
) -> np.ndarray:
    if polytope.spread == 0:
        return x
    # Centred lines pass through the nearest hull point to mu.
    pivot = x if target is None else project_onto_polytope(polytope, target.mu)
    if config.method is HarMethod.CHORD:
        line = _chord(polytope, pivot, config, rng)
    else:
        line = _extended_line(polytope, pivot, config, rng)
    proposal = _uniform_on(line, rng) if target is None else _centered_on(line, target, rng)
    proposal = proposal - proposal[0]
    if hull_gap(polytope.generators, proposal) > CHAIN_MEMBERSHIP_TOL:
        LOGGER.debug("Proposal %s left the hull, keeping the state", proposal)
        return x
    return proposal


def _check_start(polytope: TropicalPolytope, x) -> np.ndarray:
    point = normalize_point(as_point(x))
    if point.size != polytope.dimension:
        raise DimensionMismatchError(
            f"start has {point.size} coordinates, polytope has {polytope.dimension}"
        )
    gap = hull_gap(polytope.generators, point)
    if gap > CHAIN_MEMBERSHIP_TOL:
        raise StartOutsideHullError(f"start is at distance {gap:g} from the polytope")
    return point


def har_step_polytope(
    P: TropicalPolytope,
    x,
    config: ChainConfig,
    rng: np.random.Generator,
    target: CenterTarget | None = None,
) -> np.ndarray:
    """Perform one hit-and-run transition inside the hull of P.

    Args:
        P: The polytope; its hull is the state space.
        x: The current state, inside the hull.
        config: Chain settings (step method, tolerance, retry cap).
        rng: The random stream of the chain.
        target: When given, the line passes through the projection of
            target.mu onto P and the draw on it is centred there.

    Returns:
        The next state.

    """
    polytope = TropicalPolytope.coerce(P)
    return _transition(polytope, _check_start(polytope, x), config, rng, target)


def run_chain(
    P: TropicalPolytope,
    x0,
    n: int,
    config: ChainConfig,
    target: CenterTarget | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Run a chain and emit n states, each after config.intermediate_steps transitions.

    Returns:
        An n×e matrix of canonical states.

    """
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    polytope = TropicalPolytope.coerce(P)
    rng = make_rng(config.seed) if rng is None else rng
    x = _check_start(polytope, x0)
    states = np.empty((n, polytope.dimension))
    for i in range(n):
        for _ in range(config.intermediate_steps):
            x = _transition(polytope, x, config, rng, target)
        states[i] = x
    LOGGER.debug(
        "Chain emitted %s states with %s steps each (%s)",
        n, config.intermediate_steps, config.method.value,
    )
    return states
