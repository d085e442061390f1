"""KNN against a brute-force neighbor oracle."""

import numpy as np
import pytest

from augbench.classifiers import predict_labels
from augbench.classifiers.knn import DIST_EPS, KnnConfig, KnnModel, fit_knn
from augbench.rng import RngStream


def oracle_scores(train_X, train_y, X, k, weighting):
    """Independent per-point scan: sort by (distance, index), vote."""
    out = []
    for x in X:
        dists = np.sqrt(np.sum((train_X - x) ** 2, axis=1))
        order = sorted(range(len(train_y)), key=lambda i: (dists[i], i))[:k]
        labels = train_y[order]
        if weighting == "uniform":
            out.append(labels.mean())
        else:
            w = 1.0 / (dists[order] + DIST_EPS)
            out.append(np.sum(w * labels) / np.sum(w))
    return np.array(out)


@pytest.mark.parametrize("weighting", ["uniform", "inverse"])
@pytest.mark.parametrize("k", [1, 3, 7])
def test_scores_match_oracle(weighting, k):
    rng = RngStream(0, ("knn", weighting, str(k)))
    train_X = rng.derive("tr").normal(size=(40, 3))
    train_y = (rng.derive("y").uniform(0, 1, size=40) > 0.5).astype(int)
    test_X = rng.derive("te").normal(size=(25, 3))
    model = KnnModel(train_X, train_y, k, weighting)
    np.testing.assert_allclose(
        model.decision_scores(test_X),
        oracle_scores(train_X, train_y, test_X, k, weighting),
        rtol=1e-10,
    )


def test_k1_memorizes_training_points():
    rng = RngStream(1, ("mem",))
    X = rng.normal(size=(30, 2))
    y = np.arange(30) % 2
    model = KnnModel(X, y, 1, "inverse")
    np.testing.assert_array_equal(predict_labels(model, X), y)


def test_fixed_k_skips_cv_and_validates_range():
    X = np.zeros((5, 1)) + np.arange(5)[:, None]
    y = np.array([0, 0, 1, 1, 1])
    model = fit_knn(X, y, KnnConfig(k=3))
    assert model.cv_result is None and model.k == 3
    with pytest.raises(ValueError):
        fit_knn(X, y, KnnConfig(k=6))
    with pytest.raises(ValueError):
        fit_knn(X, y, KnnConfig(k=0))
    with pytest.raises(ValueError):
        fit_knn(X, y, KnnConfig(k=3, weighting="gaussian"))


def test_auto_k_comes_from_grid_and_fits_signal():
    rng = RngStream(2, ("auto",))
    X = rng.derive("x").normal(size=(100, 2))
    y = (X[:, 0] > 0).astype(int)
    model = fit_knn(X, y, rng=rng.derive("fit"))
    assert model.k in KnnConfig().k_grid
    assert model.cv_result is not None
    assert np.mean(predict_labels(model, X) == y) > 0.85


def test_empty_training_set_rejected():
    with pytest.raises(ValueError):
        fit_knn(np.zeros((0, 2)), np.zeros(0, dtype=int))


def test_hand_case_k3_uniform_and_inverse():
    # Train x = [0, 1, 2, 10], y = [0, 0, 1, 1]; query 1.5 has neighbors
    # {1, 2, 0} so the uniform vote is 1/3 -> label 0; inverse-distance
    # weighting also keeps label 0 (weights ~ 2.0 for class 1 vs ~2.67).
    X = np.array([[0.0], [1.0], [2.0], [10.0]])
    y = np.array([0, 0, 1, 1])
    query = np.array([[1.5]])
    uniform = KnnModel(X, y, 3, "uniform")
    assert uniform.decision_scores(query)[0] == pytest.approx(1 / 3)
    assert predict_labels(uniform, query)[0] == 0
    inverse = KnnModel(X, y, 3, "inverse")
    w0 = 1 / (1.5 + DIST_EPS) + 1 / (0.5 + DIST_EPS)
    w1 = 1 / (0.5 + DIST_EPS)
    assert inverse.decision_scores(query)[0] == pytest.approx(w1 / (w0 + w1))
    assert predict_labels(inverse, query)[0] == 0
