"""Tests for window decisions, the sliding detector and its sinks."""

import io
import json

import numpy as np
import pytest

from scripts.detector import (
    DetectionEvent,
    DetectorConfig,
    EventCollector,
    JsonLinesSink,
    SlidingDetector,
    StopChannelSink,
    detect_window,
    stream_detect,
)


def test_all_ones_stop():
    event = detect_window([1.0] * 30)
    assert event.mean_score == 1.0
    assert event.stop


def test_below_threshold_no_stop():
    event = detect_window([1.0] * 21 + [0.0] * 9)
    assert event.mean_score == pytest.approx(0.7)
    assert not event.stop


def test_just_above_threshold_stops():
    event = detect_window([1.0] * 22 + [0.0] * 8)
    assert event.mean_score == pytest.approx(0.7333, abs=1e-4)
    assert event.stop


def test_tie_does_not_stop():
    cfg = DetectorConfig(window_count_N=4, threshold=0.5)
    assert not detect_window([1.0, 1.0, 0.0, 0.0], cfg).stop


@pytest.mark.parametrize("scores", [[0.5] * 29, [0.5] * 31, [0.5] * 29 + [1.5], [0.5] * 29 + [float('nan')]])
def test_bad_scores_rejected(scores):
    with pytest.raises(ValueError):
        detect_window(scores)


@pytest.mark.parametrize("kwargs", [
    {'window_count_N': 0},
    {'threshold': 1.2},
    {'slide_s': 0.015},
    {'slide_s': 0.0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        DetectorConfig(**kwargs)


def test_event_invariant_enforced():
    with pytest.raises(ValueError):
        DetectionEvent(time_s=0.3, mean_score=0.9, threshold=0.717, stop=False)


def test_one_second_gives_eight_events():
    events = stream_detect([0.0] * 100)
    assert len(events) == 8
    assert events[0].time_s == pytest.approx(0.3)
    assert events[-1].time_s == pytest.approx(1.0)
    assert not any(e.stop for e in events)


def test_burst_detected_within_one_slide():
    scores = [0.0] * 47 + [1.0] * 30 + [0.0] * 60
    events = stream_detect(scores)
    burst_end = 77 * 0.01
    assert any(e.stop and burst_end - 1e-9 <= e.time_s <= burst_end + 0.1 + 1e-9 for e in events)


def test_latch_persists_until_reset():
    collector = EventCollector()
    detector = SlidingDetector(subscribers=[collector])
    for k in range(30):
        detector.push((k + 1) * 0.01, 1.0)
    for k in range(30, 60):
        detector.push((k + 1) * 0.01, 0.0)
    assert [e.triggered for e in collector.events] == [True, False, False, False]
    assert all(e.latched for e in collector.events)
    assert [e.stop for e in collector.events] == [True, False, False, False]

    detector.reset()
    for k in range(60, 90):
        detector.push((k + 1) * 0.01, 1.0)
    triggered = [e for e in collector.events if e.triggered]
    assert len(triggered) == 2


def test_gaps_degrade_or_skip():
    scores = [0.9] * 30
    scores[3:10] = [None] * 7
    (event,) = stream_detect(scores)
    assert event.degraded
    assert event.n_scores == 23
    assert event.mean_score == pytest.approx(0.9)

    mostly_missing = [None] * 16 + [1.0] * 14
    assert stream_detect(mostly_missing) == []


def test_sinks_write_lines():
    json_out, stop_out = io.StringIO(), io.StringIO()
    detector = SlidingDetector(subscribers=[JsonLinesSink(json_out), StopChannelSink(stop_out)])
    for k in range(60):
        detector.push((k + 1) * 0.01, 1.0)
    records = [json.loads(line) for line in json_out.getvalue().splitlines()]
    assert len(records) == 4
    assert {'time_s', 'mean_score', 'threshold', 'stop'} <= set(records[0])
    assert records[0]['time_s'] == 0.3
    assert stop_out.getvalue() == "STOP 0.300\n"


def test_json_sink_to_file(tmp_path):
    path = tmp_path / 'events' / 'out.jsonl'
    with JsonLinesSink(path) as sink:
        for event in stream_detect([1.0] * 40):
            sink(event)
    assert len(path.read_text().splitlines()) == 2


def test_permutation_invariance_property():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        scores = rng.random(30)
        a = detect_window(scores)
        b = detect_window(rng.permutation(scores))
        assert a.mean_score == b.mean_score
        assert a.stop == b.stop


def test_monotonicity_property():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        scores = rng.random(30) * rng.uniform(0.5, 1.5)
        scores = np.clip(scores, 0, 1)
        before = detect_window(scores)
        raised = scores.copy()
        i = rng.integers(30)
        raised[i] = rng.uniform(raised[i], 1.0)
        after = detect_window(raised)
        assert after.mean_score >= before.mean_score
        assert not (before.stop and not after.stop)


def test_threshold_sweep_property():
    rng = np.random.default_rng(2)
    for _ in range(200):
        scores = np.clip(rng.normal(rng.uniform(0.3, 0.9), 0.2, 150), 0, 1)
        low, high = np.sort(rng.random(2))
        stops_low = {e.time_s for e in stream_detect(scores, DetectorConfig(threshold=low)) if e.stop}
        stops_high = {e.time_s for e in stream_detect(scores, DetectorConfig(threshold=high)) if e.stop}
        assert stops_high <= stops_low


def test_slide_coverage_property():
    rng = np.random.default_rng(3)
    cfg = DetectorConfig()
    assert cfg.max_events_per_score == 3
    for _ in range(10_000):
        extra = int(rng.integers(0, 8))
        n_slots = cfg.window_count_N + extra * cfg.slide_windows
        events = stream_detect(rng.random(n_slots), cfg)
        assert len(events) == extra + 1
        coverage = np.zeros(n_slots, dtype=int)
        for event in events:
            end = int(round(event.time_s / cfg.window_duration_s))
            coverage[end - cfg.window_count_N:end] += 1
        assert coverage.min() >= 1
        assert coverage.max() <= cfg.max_events_per_score
