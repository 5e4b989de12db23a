"""Tests for trial scoring and classifier training on field datasets."""

import numpy as np
import pytest

from scripts.classifiers import CnnConfig, SvmModel, create_model
from scripts.evaluation import (
    ScenarioSpec,
    build_field_dataset,
    evaluate_dataset,
    normalized_segment,
    per_object_tpr,
    segment_windows,
    split_by_day,
    train_classifier,
    trial_scores,
    window_source,
)
from scripts.lsw_sim import ObjectProfile


@pytest.fixture(scope='module')
def dataset():
    spec = ScenarioSpec(
        'static_robot_moving_object',
        trials=6,
        object_profiles=(ObjectProfile('box', 1.0, 1.0), ObjectProfile('cup', 0.7, 1.0)),
        seed=11,
    )
    return build_field_dataset(spec, workers=2, progress=False)


def constant_model(bias: float) -> SvmModel:
    return SvmModel(
        support_vectors=np.zeros((1, 8)),
        dual_coefficients=np.zeros(1),
        labels=np.ones(1),
        bias=bias,
        rbf_gamma=0.5,
        regularization_C=1.0,
        feature_mean=np.zeros(8),
        feature_scale=np.ones(8),
    )


def test_normalized_segment_is_zscored(dataset):
    segment = normalized_segment(dataset.segments[0], 96000.0)
    assert segment.mean() == pytest.approx(0.0, abs=1e-9)
    assert segment.std() == pytest.approx(1.0, rel=1e-6)


def test_segment_cut_into_thirty_windows(dataset):
    windows = segment_windows(dataset.segments[0], 960)
    assert windows.shape == (30, 960)


def test_window_source_counts(dataset):
    source = window_source(dataset)
    assert source.n_windows(1) == 6 * (28800 - 960 + 1)
    assert source.n_windows(0) == 6 * (28800 - 960 + 1)


def test_constant_model_scores(dataset):
    scores = trial_scores(constant_model(2.0), dataset, progress=False)
    assert len(scores) == 12
    assert scores['score'].to_numpy() == pytest.approx(1 / (1 + np.exp(-2.0)))
    assert list(scores.columns) == ['id', 'label', 'scenario', 'day', 'object', 'score']


def test_two_channel_model_rejected(dataset):
    with pytest.raises(ValueError):
        trial_scores(create_model(CnnConfig(in_channels=2), seed=0), dataset, ids=[0], progress=False)


def test_unknown_classifier(dataset):
    with pytest.raises(ValueError):
        train_classifier(dataset, dataset.ids(), classifier='forest')


def test_svm_day_split_end_to_end(dataset):
    train, test = split_by_day(dataset)
    model, trace = train_classifier(dataset, train, classifier='svm', seed=0, progress=False)
    assert isinstance(model, SvmModel)
    assert trace is None
    result = evaluate_dataset(model, dataset, test, progress=False)
    assert len(result.scores) == len(test)
    assert 0.0 <= result.threshold <= 1.0
    assert 0.0 <= result.roc.area_under_curve <= 1.0
    per_object = per_object_tpr(dataset, result.decisions)
    assert set(per_object['object']) <= {'box', 'cup'}
    assert (per_object['trials'] > 0).all()


@pytest.fixture(scope='module')
def hand_held_dataset():
    spec = ScenarioSpec(
        'static_robot_moving_object',
        trials=20,
        object_profiles=(ObjectProfile('hand', 0.95, 2.3), ObjectProfile('phone', 0.80, 1.9)),
        seed=7,
    )
    return build_field_dataset(spec, workers=2, progress=False)


def test_svm_day_split_is_perfect_at_roc_threshold(hand_held_dataset):
    train, test = split_by_day(hand_held_dataset)
    model, _ = train_classifier(hand_held_dataset, train, classifier='svm', seed=0, progress=False)
    result = evaluate_dataset(model, hand_held_dataset, test, progress=False)
    labels = result.scores.set_index('id')['label']
    decisions = result.decisions
    positives = [i for i in test if labels[i] == 1]
    negatives = [i for i in test if labels[i] == 0]
    assert positives and negatives
    assert all(decisions[i] for i in positives)
    assert not any(decisions[i] for i in negatives)
    assert result.roc.area_under_curve == pytest.approx(1.0)
