"""Tests for the SMO-trained SVM and window features."""

import numpy as np
import pytest

from scripts.classifiers import (
    ConvergenceError,
    SvmModel,
    TrainingError,
    predict_windows,
    svm_margin,
    svm_predict,
    svm_train,
    window_features,
    windows_features,
)


@pytest.fixture
def clusters():
    rng = np.random.default_rng(0)
    pos = rng.normal((2.0, 2.0), 0.5, (40, 2))
    neg = rng.normal((-2.0, -2.0), 0.5, (40, 2))
    return np.vstack([pos, neg]), np.r_[np.ones(40), np.zeros(40)]


def test_separates_two_clusters(clusters):
    x, y = clusters
    model = svm_train(x, y)
    scores = svm_predict(model, x)
    assert np.all((scores > 0.5) == (y == 1))
    assert np.all(np.abs(model.dual_coefficients) <= model.regularization_C)


def test_boundary_lies_between_cluster_means(clusters):
    x, y = clusters
    model = svm_train(x, y)
    line = np.linspace((-2.0, -2.0), (2.0, 2.0), 201)
    signs = np.sign(svm_margin(model, line))
    assert signs[0] < 0 and signs[-1] > 0
    assert np.count_nonzero(np.diff(signs)) == 1


def test_duplicated_data_gives_same_decision(clusters):
    x, y = clusters
    grid = np.random.default_rng(1).uniform(-4, 4, (50, 2))
    once = svm_margin(svm_train(x, y, C=10.0), grid)
    twice = svm_margin(svm_train(np.vstack([x, x]), np.r_[y, y], C=10.0), grid)
    assert np.allclose(once, twice, atol=1e-2)


def test_single_pair_midpoint_scores_half():
    model = svm_train([[-1.0, 0.0], [1.0, 0.0]], [1, 0])
    assert svm_predict(model, [[0.0, 0.0]])[0] == 0.5
    assert svm_predict(model, [[-1.0, 0.0]])[0] > 0.5
    assert svm_predict(model, [[1.0, 0.0]])[0] < 0.5


def test_flipping_labels_negates_margins(clusters):
    x, y = clusters
    points = np.random.default_rng(2).uniform(-3, 3, (30, 2))
    a = svm_margin(svm_train(x, y, seed=3), points)
    b = svm_margin(svm_train(x, 1 - y, seed=3), points)
    assert np.allclose(a, -b, atol=1e-2)


def test_support_vector_order_does_not_matter(clusters):
    x, y = clusters
    model = svm_train(x, y)
    perm = np.random.default_rng(4).permutation(model.n_support)
    shuffled = SvmModel(
        support_vectors=model.support_vectors[perm],
        dual_coefficients=model.dual_coefficients[perm],
        labels=model.labels[perm],
        bias=model.bias,
        rbf_gamma=model.rbf_gamma,
        regularization_C=model.regularization_C,
        feature_mean=model.feature_mean,
        feature_scale=model.feature_scale,
    )
    assert np.allclose(svm_margin(model, x), svm_margin(shuffled, x), atol=1e-12)


def test_score_is_sigmoid_of_margin(clusters):
    x, y = clusters
    model = svm_train(x, y)
    margins = svm_margin(model, x)
    assert np.allclose(svm_predict(model, x), 1 / (1 + np.exp(-margins)))
    assert svm_predict(model, x[:1], margin=np.array([1.0]))[0] > 0.73


def test_dimension_mismatch(clusters):
    x, y = clusters
    model = svm_train(x, y)
    with pytest.raises(ValueError):
        svm_margin(model, np.zeros((3, 5)))


def test_one_class_is_a_training_error():
    with pytest.raises(TrainingError):
        svm_train(np.zeros((4, 2)), np.ones(4))


def test_iteration_cap_raises():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(60, 3))
    y = (rng.random(60) > 0.5).astype(int)
    with pytest.raises(ConvergenceError):
        svm_train(x, y, max_iter=1)


def test_constant_feature_gets_unit_scale():
    x = np.array([[0.0, 5.0], [1.0, 5.0], [3.0, 5.0], [4.0, 5.0]])
    model = svm_train(x, [0, 0, 1, 1])
    assert model.feature_scale[1] == 1.0


def test_window_features_of_a_tone():
    t = np.arange(960) / 96_000
    feats = window_features(np.sin(2 * np.pi * 1000 * t))
    assert feats.shape == (8,)
    assert feats[4] == 10
    assert feats[5] == pytest.approx(1000.0)
    assert feats[6] == pytest.approx(0.5, rel=1e-3)


def test_window_features_slope():
    t = np.arange(960) / 96_000
    feats = window_features(2.0 + 50.0 * t)
    assert feats[7] == pytest.approx(50.0)
    assert feats[2] == pytest.approx(2.0)


def test_predict_windows_routes_svm():
    rng = np.random.default_rng(6)
    t = np.arange(960) / 96_000
    pos = [np.sin(2 * np.pi * 1000 * t + rng.uniform(0, 6)) + rng.normal(0, 0.05, 960) for _ in range(10)]
    neg = [rng.normal(0, 1.0, 960) for _ in range(10)]
    windows = np.array(pos + neg)

    model = svm_train(windows_features(windows), np.r_[np.ones(10), np.zeros(10)])
    scores = predict_windows(model, windows)
    assert scores.shape == (20,)
    assert np.all((scores > 0.5) == (np.arange(20) < 10))
