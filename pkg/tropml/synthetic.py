"""Synthetic labelled data sets."""
from __future__ import annotations

import numpy as np

from .exceptions import BadDimensionError
from .phylo import subdominant_ultrametric


def two_clusters(
    n0: int,
    n1: int,
    e: int,
    separation: float,
    noise: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Return two noisy clusters whose centres are `separation` apart.

    Class 0 is centred at the origin and class 1 at (0, ..., 0, separation);
    every coordinate gets independent Gaussian noise of scale `noise`.

    Returns:
        The canonical rows (class 0 first) and their 0/1 labels.

    """
    if e < 2:
        raise BadDimensionError(f"points need at least 2 coordinates, got {e}")
    centers = np.zeros((2, e))
    centers[1, -1] = separation
    labels = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    X = centers[labels] + rng.normal(0.0, noise, size=(labels.size, e))
    return X - X[:, :1], labels


def caterpillar_vector(order: list[int], m: int) -> np.ndarray:
    """Return the ultrametric of a caterpillar tree joining leaves in `order`.

    The k-th leaf of `order` (k >= 1) joins the growing clade at distance 2k.
    """
    D = np.zeros((m, m))
    for k in range(1, m):
        joined = order[:k]
        D[order[k], joined] = D[joined, order[k]] = 2.0 * k
    return D[np.triu_indices(m, 1)]


def ultrametric_clusters(
    n0: int,
    n1: int,
    leaves: int,
    noise: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Return ultrametric vectors scattered around two species trees.

    Class 0 jitters a caterpillar joining leaves in label order and class 1 the
    caterpillar joining them in reverse. Each row adds half-normal noise to
    its species tree and is then mapped back to the nearest ultrametric below.
    """
    if leaves < 3:
        raise BadDimensionError(f"need at least 3 leaves, got {leaves}")
    species = np.vstack(
        [
            caterpillar_vector(list(range(leaves)), leaves),
            caterpillar_vector(list(range(leaves))[::-1], leaves),
        ]
    )
    labels = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    jitter = np.abs(rng.normal(0.0, noise, size=(labels.size, species.shape[1])))
    rows = np.array(
        [subdominant_ultrametric(row).values for row in species[labels] + jitter]
    )
    return rows, labels
