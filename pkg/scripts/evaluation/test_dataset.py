"""Tests for field-dataset construction, persistence and splits."""

import numpy as np
import pytest

from scripts.evaluation import (
    ScenarioSpec,
    build_field_dataset,
    check_disjoint,
    combine_datasets,
    dataset_fingerprint,
    load_dataset,
    split_by_day,
    split_by_object,
    write_dataset,
)
from scripts.lsw_sim import ObjectProfile

PROFILES = (ObjectProfile('box', 1.0, 1.0), ObjectProfile('ball', 0.6, 0.8))


def build(scenario='static_robot_moving_object', trials=4, seed=7, **kwargs):
    profiles = () if scenario == 'negative_only' else PROFILES
    spec = ScenarioSpec(scenario, trials=trials, object_profiles=profiles, seed=seed, **kwargs)
    return build_field_dataset(spec, workers=1, progress=False)


@pytest.fixture(scope='module')
def static_dataset():
    return build()


def test_negative_only_has_no_positives():
    dataset = build('negative_only', trials=3)
    assert dataset.ids(label=1) == []
    assert len(dataset.ids(label=0)) == 3


def test_segments_are_exactly_one_segment_long(static_dataset):
    assert static_dataset.manifest['segment_samples'] == 28800
    for segment in static_dataset.segments.values():
        assert segment.shape == (28800,)
        assert segment.dtype == np.float32


def test_speeds_within_range(static_dataset):
    low, high = 0.10, 0.40
    speeds = [t['speed_m_s'] for t in static_dataset.trials if t['label'] == 1]
    assert len(speeds) == 4
    assert all(low - 1e-6 <= s <= high + 1e-6 for s in speeds)


def test_positive_segment_sits_before_impact(static_dataset):
    for trial in static_dataset.trials:
        if trial['label'] == 1:
            assert trial['segment_start_s'] == pytest.approx(trial['contact_time_s'] - 0.5, abs=1e-5)


def test_objects_and_days_round_robin(static_dataset):
    positives = [t for t in static_dataset.trials if t['label'] == 1]
    assert [t['object'] for t in positives] == ['box', 'ball', 'box', 'ball']
    assert [t['day'] for t in positives] == ['day1', 'day2', 'day1', 'day2']


def test_same_spec_same_bytes(static_dataset):
    again = build()
    assert again.manifest == static_dataset.manifest
    assert dataset_fingerprint(again) == dataset_fingerprint(static_dataset)
    for trial_id, segment in static_dataset.segments.items():
        assert np.array_equal(again.segments[trial_id], segment)


def test_different_seed_differs(static_dataset):
    assert dataset_fingerprint(build(seed=8)) != dataset_fingerprint(static_dataset)


def test_static_robot_has_no_motion_events(static_dataset):
    assert all(t['disturbances'] == 0 and t['self_detections'] == 0 for t in static_dataset.trials)


def test_write_and_load(static_dataset, tmp_path):
    write_dataset(static_dataset, tmp_path / 'data')
    loaded = load_dataset(tmp_path / 'data')
    assert loaded.manifest == static_dataset.manifest
    for trial_id, segment in static_dataset.segments.items():
        assert np.array_equal(loaded.segments[trial_id], segment)


def test_tampered_segment_rejected(static_dataset, tmp_path):
    write_dataset(static_dataset, tmp_path / 'data')
    path = tmp_path / 'data' / static_dataset.trials[0]['segment_file']
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(ValueError, match="digest"):
        load_dataset(tmp_path / 'data')


def test_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path)


def test_combine_renumbers(static_dataset):
    combined = combine_datasets([static_dataset, build('negative_only', trials=2)])
    assert combined.ids() == list(range(10))
    assert len(combined.manifest['scenarios']) == 2
    assert combined.trials[-1]['scenario'] == 'negative_only'


def test_invalid_spec():
    with pytest.raises(ValueError):
        ScenarioSpec('static_robot_moving_object', trials=0, object_profiles=PROFILES)
    with pytest.raises(ValueError):
        ScenarioSpec('static_robot_moving_object')
    with pytest.raises(ValueError):
        ScenarioSpec('sideways', object_profiles=PROFILES)


def test_object_split(static_dataset):
    train, test = split_by_object(static_dataset)
    check_disjoint(train, test)
    assert sorted(train + test) == static_dataset.ids()
    objects = lambda ids: {static_dataset.trial(i)['object'] for i in ids if static_dataset.trial(i)['label'] == 1}
    assert objects(train) == {'box'}
    assert objects(test) == {'ball'}
    r_train, r_test = split_by_object(static_dataset, reverse=True)
    assert objects(r_train) == {'ball'}
    assert sorted(r_test) == sorted(train)


def test_day_split(static_dataset):
    train, test = split_by_day(static_dataset)
    check_disjoint(train, test)
    assert {static_dataset.trial(i)['day'] for i in train} == {'day1'}
    assert {static_dataset.trial(i)['day'] for i in test} == {'day2'}
