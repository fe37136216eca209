"""Tests for tropical kernel density estimation."""
import numpy as np
import pytest

from tropml.exceptions import DimensionMismatchError, TooFewPointsError
from tropml.helpers import make_rng
from tropml.learn import KdeModel, kde_fit, kde_outlier_scores, kde_scores, roc_auc

LINE = np.array([[0.0, 0.0], [0.0, 2.0], [0.0, 6.0]])


def test_bandwidths_follow_nearest_neighbours():
    model = kde_fit(LINE, multiplier=1.0)
    assert model.bandwidths.tolist() == [2, 2, 4]
    assert kde_fit(LINE).bandwidths.tolist() == [4, 4, 8]


def test_duplicate_points_get_the_floor_bandwidth():
    model = kde_fit([[0.0, 1.0], [0.0, 1.0], [0.0, 5.0]])
    assert model.bandwidths[0] == pytest.approx(1e-9)
    assert np.all(model.bandwidths > 0)


def test_scores_with_holdout():
    model = kde_fit(LINE, multiplier=1.0)
    scores = kde_scores(model, LINE, holdout_self=True)
    expected = [
        (np.exp(-1.0) + np.exp(-1.5)) / 2,
        (np.exp(-1.0) + np.exp(-1.0)) / 2,
        (np.exp(-3.0) + np.exp(-2.0)) / 2,
    ]
    assert np.allclose(scores, expected)
    assert int(np.argmin(scores)) == 2


def test_scores_without_holdout_count_every_kernel():
    model = kde_fit(LINE, multiplier=1.0)
    score = kde_scores(model, [[0.0, 0.0]])[0]
    assert score == pytest.approx((1.0 + np.exp(-1.0) + np.exp(-1.5)) / 3)


def test_far_queries_score_low():
    model = kde_fit(LINE)
    near, far = kde_scores(model, [[0.0, 1.0], [0.0, 100.0]])
    assert far < near


def test_outlier_scores_rank_foreign_points_low():
    rng = make_rng(21)
    reference = rng.normal(size=(1000, 4))
    inliers = rng.normal(size=(100, 4))
    outliers = rng.normal(size=(100, 4)) + np.array([0.0, 0.0, 0.0, 20.0])
    candidates = np.vstack([inliers, outliers])
    labels = np.repeat([0, 1], 100)
    scores = kde_outlier_scores(reference, candidates)
    assert roc_auc(-scores, labels)[0] >= 0.95


def test_outlier_bandwidth_uses_the_candidate():
    # The candidate sits 1 from the first reference point, closer than its
    # neighbour at 10, so that kernel uses bandwidth 2 * 1.
    reference = [[0.0, 0.0], [0.0, 10.0]]
    score = kde_outlier_scores(reference, [[0.0, 1.0]])[0]
    assert score == pytest.approx((np.exp(-1 / 2) + np.exp(-9 / 18)) / 2)


def test_validation():
    with pytest.raises(TooFewPointsError):
        kde_fit([[0.0, 1.0]])
    with pytest.raises(ValueError):
        kde_fit(LINE, multiplier=0.0)
    with pytest.raises(DimensionMismatchError):
        kde_scores(kde_fit(LINE), [[0.0, 1.0, 2.0]])
    with pytest.raises(DimensionMismatchError):
        kde_outlier_scores(LINE, [[0.0, 1.0, 2.0]])
    with pytest.raises(DimensionMismatchError):
        KdeModel(LINE, np.ones(2), 1.0)
    with pytest.raises(ValueError):
        KdeModel(LINE, np.array([1.0, 0.0, 1.0]), 1.0)


def test_ranking_ignores_the_chart():
    rng = make_rng(4)
    X = rng.normal(size=(60, 3)) * 2
    shifts = rng.uniform(-50, 50, size=(60, 1))
    plain = kde_scores(kde_fit(X), X, holdout_self=True)
    moved = kde_scores(kde_fit(X + shifts), X + 3.5, holdout_self=True)
    assert np.allclose(moved, plain)
    assert np.array_equal(np.argsort(moved, kind="stable"), np.argsort(plain, kind="stable"))
