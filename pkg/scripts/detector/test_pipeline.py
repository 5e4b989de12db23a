"""Tests for the streaming detection pipeline and the response budget."""

import io

import numpy as np
import pytest

from scripts.classifiers import CnnConfig, SvmModel, create_model
from scripts.detector import (
    DetectionPipeline,
    DetectorConfig,
    LatencyTracker,
    StopChannelSink,
    response_budget_check,
)
from scripts.evaluation import field_envelope
from scripts.lsw_sim import ChannelModel, ExcitationConfig, SampleBuffer, gen_excitation, simulate_received


def constant_model(bias: float) -> SvmModel:
    """Scores sigmoid(bias) for every window."""
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


@pytest.fixture(scope='module')
def quiet_second():
    excitation = gen_excitation(ExcitationConfig(), 1.0)
    return simulate_received(excitation, ChannelModel(rng_seed=3))


def test_one_second_gives_seven_events(quiet_second):
    events = DetectionPipeline(constant_model(-5.0)).run(quiet_second)
    assert len(events) == 7
    assert [round(e.time_s, 6) for e in events] == pytest.approx([0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
    assert not any(e.stop for e in events)
    assert all(e.n_scores == 30 and not e.degraded for e in events)


def test_first_slide_is_warmup(quiet_second):
    pipeline = DetectionPipeline(constant_model(5.0))
    assert pipeline.delay_samples == (len(pipeline.filter.kernel) - 1) // 2
    assert pipeline.warmup_samples == pipeline.slide_samples == 9600
    events = pipeline.run(quiet_second)
    assert events[0].time_s == pytest.approx(0.4)
    assert events[0].n_scores == 30


def test_streaming_envelope_matches_field_envelope(quiet_second):
    pipeline = DetectionPipeline(constant_model(0.0))
    samples = quiet_second.samples
    env = np.concatenate([
        pipeline.envelope_stage(pipeline.filter_stage(samples[start:start + 1000]))
        for start in range(0, len(samples), 1000)
    ])
    offline = field_envelope(quiet_second)
    assert len(env) > 90_000
    assert env == pytest.approx(offline[:len(env)], rel=1e-9, abs=1e-12)


def test_finish_scores_the_last_boundary(quiet_second):
    pipeline = DetectionPipeline(constant_model(-5.0))
    events = []
    for start in range(0, len(quiet_second), 960):
        events.extend(pipeline.process(quiet_second.samples[start:start + 960]))
    assert events[-1].time_s == pytest.approx(0.9)
    tail = pipeline.finish()
    assert [round(e.time_s, 6) for e in tail] == [1.0]
    assert pipeline.finish() == []


def test_stop_channel_fires_once(quiet_second):
    out = io.StringIO()
    events = DetectionPipeline(constant_model(5.0), subscribers=[StopChannelSink(out)]).run(quiet_second)
    assert all(e.stop for e in events)
    assert out.getvalue() == "STOP 0.400\n"


def test_threaded_run_matches_sequential(quiet_second):
    model = create_model(seed=0)
    sequential = DetectionPipeline(model).run(quiet_second)
    threaded = DetectionPipeline(model).run_threaded(quiet_second)
    assert [(e.time_s, e.mean_score, e.stop) for e in sequential] == \
        [(e.time_s, e.mean_score, e.stop) for e in threaded]


def test_chunk_size_does_not_change_decisions(quiet_second):
    model = create_model(seed=1)
    small = DetectionPipeline(model).run(quiet_second, chunk_samples=960)
    large = DetectionPipeline(model).run(quiet_second, chunk_samples=7001)
    assert [e.mean_score for e in small] == pytest.approx([e.mean_score for e in large], abs=1e-6)


def test_paced_run_matches_offline_and_meets_budget(quiet_second):
    model = constant_model(0.3)
    offline = DetectionPipeline(model).run(quiet_second)
    tracker = LatencyTracker()
    paced = DetectionPipeline(model, tracker=tracker).run(quiet_second, pace=True)
    assert [(e.time_s, e.mean_score, e.stop) for e in paced] == [(e.time_s, e.mean_score, e.stop) for e in offline]

    report = response_budget_check(tracker, quiet_second.sample_rate_hz)
    assert report.events == 7
    assert report.passed
    assert report.latency_max_ms <= 50
    assert set(report.stage_mean_ms) == {'filter', 'analytic', 'normalize', 'classify', 'detect'}
    assert report.v_max_m_s == pytest.approx(1.22)


def test_offline_throughput_above_real_time(quiet_second):
    tracker = LatencyTracker()
    DetectionPipeline(constant_model(0.0), tracker=tracker).run(quiet_second)
    report = response_budget_check(tracker, quiet_second.sample_rate_hz)
    assert report.realtime_factor >= 2.0


def test_underrun_degrades_events(quiet_second):
    pipeline = DetectionPipeline(constant_model(0.5))
    events = []
    samples = quiet_second.samples
    for k, start in enumerate(range(0, len(samples), 960)):
        if k == 40:
            events.extend(pipeline.process(None, gap_samples=960))
        else:
            events.extend(pipeline.process(samples[start:start + 960]))
    events.extend(pipeline.finish())
    assert len(events) == 7
    degraded = [e for e in events if e.degraded]
    assert [round(e.time_s, 6) for e in degraded] == [0.5, 0.6, 0.7]
    assert all(e.n_scores == 29 for e in degraded)
    assert pipeline._missing == []


def test_window_length_is_enforced(quiet_second):
    cfg = DetectorConfig(window_duration_s=0.005, slide_s=0.1)
    with pytest.raises(ValueError, match="960 samples"):
        DetectionPipeline(constant_model(0.0), cfg).run(quiet_second)


def test_sample_rate_mismatch(quiet_second):
    resampled = SampleBuffer(quiet_second.samples, 48000.0)
    with pytest.raises(ValueError, match="sample rate"):
        DetectionPipeline(constant_model(0.0)).run(resampled)


def test_two_channel_model_rejected():
    model = create_model(CnnConfig(in_channels=2), seed=0)
    with pytest.raises(ValueError):
        DetectionPipeline(model)
