"""Max-plus arithmetic and linear algebra on the tropical projective torus."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .const import EQUAL_TOL, EXHAUSTIVE_DET_MAX, LOGGER
from .exceptions import (
    DimensionMismatchError,
    EmptyInputError,
    NonFiniteError,
    NotSquareError,
    RaggedRowsError,
    TooShortError,
)

# Elements per temporary block in pairwise computations.
_CHUNK_ELEMENTS = 4_000_000


class Algebra(Enum):
    """The tropical semiring a hyperplane is defined over."""

    MAX = "max"
    MIN = "min"


def as_point(v: Sequence[float] | np.ndarray) -> np.ndarray:
    """Return v as a finite float vector with at least two coordinates."""
    point = np.asarray(v, dtype=float)
    if point.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {point.shape}")
    if point.size < 2:
        raise TooShortError(f"a point needs at least 2 coordinates, got {point.size}")
    if not np.all(np.isfinite(point)):
        raise NonFiniteError("point has NaN or infinite coordinates")
    return point


def as_points(rows: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Return rows as a finite s×e float matrix, rejecting ragged input."""
    if not isinstance(rows, np.ndarray):
        lengths = {len(row) for row in rows}
        if len(lengths) > 1:
            raise RaggedRowsError(f"rows have different lengths {sorted(lengths)}")
    matrix = np.asarray(rows, dtype=float)
    if matrix.ndim == 1 and matrix.size == 0:
        raise EmptyInputError("no points given")
    if matrix.ndim != 2:
        raise RaggedRowsError(f"expected a matrix, got shape {matrix.shape}")
    if matrix.shape[0] == 0:
        raise EmptyInputError("no points given")
    if matrix.shape[1] < 2:
        raise TooShortError(
            f"a point needs at least 2 coordinates, got {matrix.shape[1]}"
        )
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError("matrix has NaN or infinite entries")
    return matrix


def _check_same_length(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape[-1] != v.shape[-1]:
        raise DimensionMismatchError(
            f"points have {u.shape[-1]} and {v.shape[-1]} coordinates"
        )


def normalize_point(v: Sequence[float] | np.ndarray) -> np.ndarray:
    """Return the canonical representative of v (first coordinate zero)."""
    point = as_point(v)
    return point - point[0]


def normalize_matrix(M: Sequence[Sequence[float]] | np.ndarray) -> TropicalPolytope:
    """Canonicalize every row of M independently."""
    return TropicalPolytope(as_points(M))


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    return matrix - matrix[:, :1]


@dataclass(frozen=True, eq=False)
class TropicalPolytope:
    """The tropical convex hull of an ordered list of generators."""

    generators: np.ndarray

    def __post_init__(self) -> None:
        rows = _normalize_rows(as_points(self.generators))
        rows.setflags(write=False)
        object.__setattr__(self, "generators", rows)

    @classmethod
    def coerce(cls, points: TropicalPolytope | Sequence | np.ndarray) -> TropicalPolytope:
        """Return points as a polytope, wrapping raw matrices."""
        if isinstance(points, cls):
            return points
        return cls(as_points(points))

    @property
    def size(self) -> int:
        """Number of generators s."""
        return self.generators.shape[0]

    @property
    def dimension(self) -> int:
        """Number of coordinates e."""
        return self.generators.shape[1]

    @cached_property
    def spread(self) -> float:
        """Largest tropical distance between two generators."""
        return float(pairwise_distances(self.generators).max())

    def __len__(self) -> int:
        return self.size


@dataclass(frozen=True, eq=False)
class TropicalHyperplane:
    """A tropical hyperplane with normal vector omega."""

    normal: np.ndarray
    algebra: Algebra = Algebra.MAX

    def __post_init__(self) -> None:
        object.__setattr__(self, "normal", normalize_point(self.normal))
        object.__setattr__(self, "algebra", Algebra(self.algebra))

    @property
    def apex(self) -> np.ndarray:
        """The point where the extremum is attained in every coordinate."""
        return normalize_point(-self.normal)


@dataclass(frozen=True, eq=False)
class TropicalSegment:
    """A tropical line segment stored as its ordered bend points.

    Consecutive bends are joined by Euclidean legs in the canonical chart, so
    the segment can be walked by Euclidean arc length.
    """

    bends: np.ndarray
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        bends = _normalize_rows(as_points(self.bends))
        bends.setflags(write=False)
        object.__setattr__(self, "bends", bends)
        legs = np.linalg.norm(np.diff(bends, axis=0), axis=1)
        object.__setattr__(self, "cumulative", np.concatenate(([0.0], np.cumsum(legs))))

    @property
    def source(self) -> np.ndarray:
        """First bend."""
        return self.bends[0]

    @property
    def target(self) -> np.ndarray:
        """Last bend."""
        return self.bends[-1]

    @property
    def leg_lengths(self) -> np.ndarray:
        """Euclidean length of each leg."""
        return np.diff(self.cumulative)

    @property
    def length(self) -> float:
        """Total Euclidean arc length."""
        return float(self.cumulative[-1])

    def legs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Return the (start, end) pairs of consecutive bends."""
        return [(self.bends[k], self.bends[k + 1]) for k in range(len(self.bends) - 1)]

    def point_at(self, s: float | np.ndarray) -> np.ndarray:
        """Return the point(s) at arc length s from the source."""
        if len(self.bends) == 1:
            return np.broadcast_to(self.bends[0], np.shape(s) + self.bends[0].shape).copy()
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.length)
        leg = np.clip(
            np.searchsorted(self.cumulative, s, side="right") - 1, 0, len(self.bends) - 2
        )
        width = self.cumulative[leg + 1] - self.cumulative[leg]
        frac = np.where(width > 0, (s - self.cumulative[leg]) / np.where(width > 0, width, 1.0), 0.0)
        start = self.bends[leg]
        end = self.bends[leg + 1]
        return start + np.expand_dims(frac, -1) * (end - start)


def trop_distance(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    """Return the tropical metric max(u - v) - min(u - v)."""
    u, v = as_point(u), as_point(v)
    _check_same_length(u, v)
    diff = u - v
    return float(diff.max() - diff.min())


def pairwise_distances(X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
    """Return the matrix of tropical distances between rows of X and rows of Y.

    Args:
        X: An N×e matrix.
        Y: An M×e matrix; X itself when omitted.

    Returns:
        The N×M distance matrix.

    """
    X = as_points(X)
    Y = X if Y is None else as_points(Y)
    _check_same_length(X, Y)
    out = np.empty((X.shape[0], Y.shape[0]))
    chunk = max(1, _CHUNK_ELEMENTS // max(1, Y.shape[0] * Y.shape[1]))
    for start in range(0, X.shape[0], chunk):
        diff = X[start:start + chunk, None, :] - Y[None, :, :]
        out[start:start + chunk] = diff.max(axis=2) - diff.min(axis=2)
    return out


def trop_linear_combination(
    coeffs: Sequence[float] | np.ndarray, points: Sequence | np.ndarray
) -> np.ndarray:
    """Return the normalized max over l of coeffs[l] + points[l]."""
    matrix = as_points(points)
    weights = np.asarray(coeffs, dtype=float).reshape(-1)
    if weights.size != matrix.shape[0]:
        raise DimensionMismatchError(
            f"{weights.size} coefficients for {matrix.shape[0]} points"
        )
    if not np.all(np.isfinite(weights)):
        raise NonFiniteError("coefficients have NaN or infinite entries")
    combined = (weights[:, None] + matrix).max(axis=0)
    return combined - combined[0]


def _assignment_exhaustive(M: np.ndarray, tol: float) -> np.ndarray:
    """Return the lexicographically smallest optimal permutation."""
    w = M.shape[0]
    perms = np.array(list(permutations(range(w))), dtype=int)
    scores = M[perms, np.arange(w)].sum(axis=1)
    best = int(np.flatnonzero(scores >= scores.max() - tol)[0])
    return perms[best]


def _assignment_hungarian(M: np.ndarray) -> np.ndarray:
    row_ind, col_ind = linear_sum_assignment(M, maximize=True)
    sigma = np.empty(M.shape[0], dtype=int)
    sigma[col_ind] = row_ind
    return sigma


def trop_det(
    M: Sequence[Sequence[float]] | np.ndarray, tol: float = EQUAL_TOL
) -> tuple[float, np.ndarray]:
    """Compute the tropical determinant of a square matrix.

    The value is the maximum over permutations sigma of the sum of
    M[sigma(i), i]; ties go to the lexicographically smallest permutation
    while the exhaustive search is used.

    Args:
        M: A w×w matrix.
        tol: Score tolerance for treating permutations as tied.

    Returns:
        The determinant and M with its rows permuted so the optimal
        assignment lies on the diagonal.

    """
    matrix = np.asarray(M, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] == 0:
        raise EmptyInputError("empty matrix")
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError("matrix has NaN or infinite entries")
    if matrix.shape[0] <= EXHAUSTIVE_DET_MAX:
        sigma = _assignment_exhaustive(matrix, tol)
    else:
        sigma = _assignment_hungarian(matrix)
    value = float(matrix[sigma, np.arange(matrix.shape[0])].sum())
    LOGGER.debug("Tropical determinant %s with permutation %s", value, sigma)
    return value, matrix[sigma].copy()


def trop_segment(
    u: Sequence[float] | np.ndarray,
    v: Sequence[float] | np.ndarray,
    tol: float = EQUAL_TOL,
) -> TropicalSegment:
    """Return the tropical line segment from v to u."""
    u, v = normalize_point(u), normalize_point(v)
    _check_same_length(u, v)
    levels = np.sort(v - u)
    candidates = np.maximum(levels[:, None] + u[None, :], v[None, :])
    candidates = _normalize_rows(candidates)
    keep = [candidates[0]]
    for row in candidates[1:]:
        if np.abs(row - keep[-1]).max() > tol:
            keep.append(row)
    return TropicalSegment(np.array(keep))


def project_onto_polytope(
    P: TropicalPolytope | np.ndarray, x: Sequence[float] | np.ndarray
) -> np.ndarray:
    """Return the tropical projection of x onto the hull of P."""
    polytope = TropicalPolytope.coerce(P)
    point = as_point(x)
    _check_same_length(polytope.generators, point)
    V = polytope.generators
    lam = (point[None, :] - V).min(axis=1)
    projected = (lam[:, None] + V).max(axis=0)
    return projected - projected[0]


def project_many(P: TropicalPolytope | np.ndarray, X: np.ndarray) -> np.ndarray:
    """Project every row of X onto the hull of P."""
    polytope = TropicalPolytope.coerce(P)
    points = as_points(X)
    _check_same_length(polytope.generators, points)
    V = polytope.generators
    out = np.empty_like(points)
    chunk = max(1, _CHUNK_ELEMENTS // max(1, V.size))
    for start in range(0, points.shape[0], chunk):
        block = points[start:start + chunk]
        lam = (block[:, None, :] - V[None, :, :]).min(axis=2)
        out[start:start + chunk] = (lam[:, :, None] + V[None, :, :]).max(axis=1)
    return _normalize_rows(out)


def hull_gap(V: np.ndarray, X: np.ndarray) -> np.ndarray | float:
    """Return d(x, projection of x) for a point or rows of points.

    Works on raw arrays without validation; callers pass canonical
    generators V and points of matching width.
    """
    if X.ndim == 1:
        lam = (X[None, :] - V).min(axis=1)
        diff = X - (lam[:, None] + V).max(axis=0)
        return float(diff.max() - diff.min())
    lam = (X[:, None, :] - V[None, :, :]).min(axis=2)
    diff = X - (lam[:, :, None] + V[None, :, :]).max(axis=1)
    return diff.max(axis=1) - diff.min(axis=1)


def hyperplane_distance(
    H: TropicalHyperplane, v: Sequence[float] | np.ndarray
) -> float:
    """Return the tropical distance from v to the hyperplane H."""
    point = as_point(v)
    _check_same_length(H.normal, point)
    w = np.sort(point + H.normal)
    if H.algebra is Algebra.MAX:
        return float(w[-1] - w[-2])
    return float(w[1] - w[0])
