"""Tests for ROC analysis, TPR/TNR tables and the speed limit."""

import math

import numpy as np
import pandas as pd
import pytest

from scripts.evaluation import (
    compute_roc,
    detector_threshold,
    evaluate_scores,
    max_speed,
    table_one,
    tpr_tnr,
    write_gnuplot,
    write_roc_csv,
)


def test_perfect_separation():
    roc = compute_roc([0.9, 0.8, 0.7, 0.2, 0.1], [1, 1, 1, 0, 0])
    assert roc.area_under_curve == 1.0
    assert any(t == 1.0 and f == 0.0 for t, f in zip(roc.tpr, roc.fpr))
    assert roc.tpr[roc.best_index] == 1.0
    assert roc.fpr[roc.best_index] == 0.0
    assert roc.best_threshold == pytest.approx(0.2)


def test_random_labels_near_chance():
    rng = np.random.default_rng(0)
    scores = rng.random(10_000)
    labels = rng.integers(0, 2, 10_000)
    assert 0.47 <= compute_roc(scores, labels).area_under_curve <= 0.53


def test_reversed_scores_complement():
    rng = np.random.default_rng(1)
    labels = rng.integers(0, 2, 500)
    scores = labels * 0.3 + rng.random(500)
    auc = compute_roc(scores, labels).area_under_curve
    assert compute_roc(-scores, labels).area_under_curve == pytest.approx(1 - auc)


def test_monotone_transform_keeps_auc():
    rng = np.random.default_rng(2)
    labels = rng.integers(0, 2, 300)
    scores = labels * 0.5 + rng.random(300)
    a = compute_roc(scores, labels).area_under_curve
    b = compute_roc(np.exp(3 * scores), labels).area_under_curve
    assert a == pytest.approx(b)


def test_roc_rows_and_monotonicity():
    scores = [0.1, 0.4, 0.4, 0.35, 0.8, 0.8, 0.9]
    labels = [0, 0, 1, 1, 1, 0, 1]
    roc = compute_roc(scores, labels)
    assert len(roc.thresholds) == 5 + 2
    assert math.isinf(roc.thresholds[0]) and math.isinf(roc.thresholds[-1])
    assert (roc.tpr[0], roc.fpr[0]) == (0.0, 0.0)
    assert (roc.tpr[-1], roc.fpr[-1]) == (1.0, 1.0)
    assert np.all(np.diff(roc.tpr) >= 0)
    assert np.all(np.diff(roc.fpr) >= 0)
    assert 0 <= roc.area_under_curve <= 1


def test_best_point_ties_prefer_high_threshold():
    # Thresholds 0.8 and 0.2 both give TPR - FPR = 0.5
    roc = compute_roc([0.9, 0.8, 0.5, 0.2], [1, 0, 1, 0])
    assert roc.best_threshold == pytest.approx(0.8)


def test_single_class_rejected():
    with pytest.raises(ValueError):
        compute_roc([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        compute_roc([0.1, 0.2], [0, 2])


def test_threshold_clipped_for_detector():
    roc = compute_roc([0.9, 0.8], [1, 0])
    assert 0.0 <= detector_threshold(roc) <= 1.0


def test_metrics_match_roc_point():
    rng = np.random.default_rng(3)
    labels = rng.integers(0, 2, 400)
    scores = np.clip(labels * 0.3 + rng.random(400) * 0.7, 0, 1)
    roc = compute_roc(scores, labels)
    for k in (1, len(roc.thresholds) // 2, len(roc.thresholds) - 2):
        threshold = roc.thresholds[k]
        row = tpr_tnr(scores > threshold, labels).iloc[0]
        assert row['tpr'] == pytest.approx(roc.tpr[k])
        assert row['tnr'] == pytest.approx(1 - roc.fpr[k])


def test_all_correct():
    row = tpr_tnr([True, True, False, False], [1, 1, 0, 0]).iloc[0]
    assert row['tpr'] == 1.0
    assert row['tnr'] == 1.0


def test_sixty_one_of_sixty_four():
    decisions = [True] * 61 + [False] * 3
    row = tpr_tnr(decisions, [1] * 64).iloc[0]
    assert round(100 * row['tpr'], 1) == 95.3
    assert math.isnan(row['tnr'])


def test_per_group_rows():
    frame = tpr_tnr([True, False, True, False], [1, 1, 1, 0], ['cup', 'cup', 'hand', 'hand'])
    assert list(frame['group']) == ['all', 'cup', 'hand']
    assert frame.set_index('group').loc['cup', 'tpr'] == 0.5
    assert math.isnan(frame.set_index('group').loc['cup', 'tnr'])


def test_table_one_layout():
    decisions = [True, True, True, False, False, False, True]
    labels = [1, 1, 1, 1, 0, 0, 0]
    scenarios = [
        'moving_robot_static_object',
        'moving_robot_moving_object',
        'static_robot_moving_object',
        'moving_robot_moving_object',
        'negative_only',
        'negative_only',
        'moving_robot_moving_object',
    ]
    table = table_one(decisions, labels, scenarios)
    assert list(table['metric']) == ['Static Object TPR', 'Moving Object TPR', 'TNR']
    assert list(table['percent']) == [100.0, 66.7, 66.7]
    assert list(table['trials']) == [1, 3, 3]


@pytest.mark.parametrize("D, t, expected", [(0.183, 0.15, 1.22), (0.109, 0.15, 0.7267), (0.0, 0.15, 0.0)])
def test_max_speed(D, t, expected):
    assert max_speed(D, t) == pytest.approx(expected, abs=1e-4)


def test_max_speed_in_centimetres():
    assert 100 * max_speed(0.183, 0.150) == pytest.approx(122.0)
    assert 72 <= 100 * max_speed(0.109, 0.150) <= 73


@pytest.mark.parametrize("D, t", [(0.1, 0.0), (0.1, -1.0), (-0.1, 0.15)])
def test_max_speed_rejects(D, t):
    with pytest.raises(ValueError):
        max_speed(D, t)


def test_evaluate_scores_uses_roc_threshold():
    scores = pd.DataFrame({
        'id': range(6),
        'label': [1, 1, 1, 0, 0, 0],
        'scenario': ['moving_robot_static_object'] * 2 + ['moving_robot_moving_object'] + ['negative_only'] * 3,
        'day': ['day1'] * 6,
        'object': ['box', 'box', 'cup', None, None, None],
        'score': [0.95, 0.9, 0.85, 0.3, 0.2, 0.1],
    })
    result = evaluate_scores(scores)
    assert result.threshold == pytest.approx(0.3)
    assert list(result.table['percent']) == [100.0, 100.0, 100.0]
    assert list(result.by_object['group']) == ['box', 'cup']
    assert all(result.decisions[i] for i in range(3))
    forced = evaluate_scores(scores, threshold=0.92)
    assert list(forced.table['percent']) == [50.0, 0.0, 100.0]


def test_roc_csv_rows(tmp_path):
    roc = compute_roc([0.1, 0.5, 0.5, 0.9], [0, 1, 0, 1])
    path = write_roc_csv(roc, tmp_path / 'roc.csv')
    frame = pd.read_csv(path)
    assert list(frame.columns) == ['threshold', 'tpr', 'fpr']
    assert len(frame) == 3 + 2


def test_gnuplot_header(tmp_path):
    frame = pd.DataFrame({'label': ['0 deg', '60 deg'], 'max_distance_cm': [18.3, 14.0]})
    path = write_gnuplot(frame, tmp_path / 'angles.dat', title="angle sweep")
    lines = path.read_text().splitlines()
    assert lines[0] == "# angle sweep"
    assert lines[1] == "# label max_distance_cm"
    assert lines[2] == '"0 deg" 18.3'
