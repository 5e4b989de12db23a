"""
Streaming detection: received samples in, detector events out.

    bandpass -> analytic blocks -> envelope -> 0.3 s normalization
    -> 960-sample windows -> classifier scores -> sliding detector

The filter's group delay is dropped before blocking, so envelope sample k
belongs to input sample k and the blocks sit on the same grid as the
offline field-trial envelope. The first slide is filter warm-up and is
never scored.

At every slide boundary the trailing 0.3 s of envelope is z-scored as one
window and the windows that became complete since the previous boundary
are scored, so every window gets exactly one score. The first boundary
comes one slide after warm-up and scores all N windows behind it.
"""

import logging
import math
import time
from typing import Iterable, List, Optional, Tuple

import numpy as np

from scripts.classifiers import AuraCnn, WindowSample, predict_windows
from scripts.dsp import AnalyticStream, BandpassFilter, BandpassSpec, StreamPipeline, design_bandpass, normalize_windows
from scripts.dsp.constants import BLOCK_LENGTH, NORMALIZE_WINDOW_S
from scripts.lsw_sim.constants import SAMPLE_RATE_HZ
from scripts.lsw_sim.models import SampleBuffer

from .constants import PIPELINE_CHUNK_S
from .latency import LatencyTracker
from .models import DetectionEvent, DetectorConfig
from .sliding import SlidingDetector, Subscriber

logger = logging.getLogger(__name__)


class DetectionPipeline:
    """One stream's worth of filter, analytic, scoring and detector state."""

    def __init__(
        self,
        model,
        cfg: DetectorConfig = DetectorConfig(),
        sample_rate_hz: float = SAMPLE_RATE_HZ,
        spec: BandpassSpec = BandpassSpec(),
        block_length: int = BLOCK_LENGTH,
        normalize_s: float = NORMALIZE_WINDOW_S,
        subscribers: Iterable[Subscriber] = (),
        tracker: Optional[LatencyTracker] = None,
        start_time_s: float = 0.0,
    ):
        if isinstance(model, AuraCnn) and model.config.in_channels != 1:
            raise ValueError("the streaming pipeline scores envelope windows; the model expects two channels")
        self.model = model
        self.cfg = cfg
        self.sample_rate_hz = sample_rate_hz
        self.start_time_s = start_time_s
        self.window_samples = int(round(cfg.window_duration_s * sample_rate_hz))
        self.slide_samples = cfg.slide_windows * self.window_samples
        self.span_samples = cfg.window_count_N * self.window_samples
        self.normalize_s = normalize_s
        self.filter = BandpassFilter(design_bandpass(spec, sample_rate_hz))
        self.analytic = AnalyticStream(block_length)
        self.detector = SlidingDetector(cfg, subscribers)
        self.tracker = tracker or LatencyTracker()

        self.delay_samples = (len(self.filter.kernel) - 1) // 2
        transient = math.ceil(self.delay_samples / block_length) * block_length
        self.warmup_samples = math.ceil(transient / self.slide_samples) * self.slide_samples
        self._trim = self.delay_samples
        self._aligned_total = 0

        self._env = np.zeros(0)
        self._env_start = 0
        self._env_total = 0
        self._next_boundary = self.warmup_samples + self.span_samples
        self._scored_until = self.warmup_samples
        self._input_total = 0
        self._missing: List[Tuple[int, int]] = []

    # Stages

    def filter_stage(self, chunk: np.ndarray) -> np.ndarray:
        with self.tracker.stage('filter'):
            return self._align(self.filter.process(chunk))

    def _align(self, filtered: np.ndarray) -> np.ndarray:
        drop = min(self._trim, len(filtered))
        self._trim -= drop
        filtered = filtered[drop:]
        self._aligned_total += len(filtered)
        return filtered

    def envelope_stage(self, filtered: np.ndarray) -> np.ndarray:
        with self.tracker.stage('analytic'):
            rows = self.analytic.process(filtered)
            return np.abs(rows).ravel()

    def score_stage(self, env: np.ndarray) -> Optional[np.ndarray]:
        """Rows of (window end time, score or NaN) for windows ready to score."""
        self._env = np.concatenate((self._env, env))
        self._env_total += len(env)
        out = []
        while self._env_total >= self._next_boundary:
            out.append(self._score_boundary(self._next_boundary))
            self._next_boundary += self.slide_samples
        keep_from = min(self._next_boundary - self.span_samples, self._env_total)
        if keep_from > self._env_start:
            self._env = self._env[keep_from - self._env_start:]
            self._env_start = keep_from
        return np.concatenate(out) if out else None

    def _score_boundary(self, boundary: int) -> np.ndarray:
        lo = boundary - self.span_samples
        segment = self._env[lo - self._env_start:boundary - self._env_start]
        with self.tracker.stage('normalize'):
            normalized = normalize_windows(
                SampleBuffer(segment, self.sample_rate_hz), window_s=self.normalize_s
            ).samples
        first = max(self._scored_until, lo)
        starts = np.arange(first, boundary, self.window_samples)
        windows = WindowSample(np.stack([normalized[s - lo:s - lo + self.window_samples] for s in starts])).values
        with self.tracker.stage('classify'):
            scores = predict_windows(self.model, windows, self.sample_rate_hz)
        ends = starts + self.window_samples
        for k, (s, e) in enumerate(zip(starts, ends)):
            if any(a < e and s < b for a, b in self._missing):
                scores[k] = np.nan
        self._scored_until = boundary
        self._missing = [(a, b) for a, b in self._missing if b > boundary]
        times = self.start_time_s + ends / self.sample_rate_hz
        return np.column_stack((times, scores))

    def detect_stage(self, rows: np.ndarray) -> List[DetectionEvent]:
        events = []
        with self.tracker.stage('detect'):
            for t, score in rows:
                event = self.detector.push(float(t), None if np.isnan(score) else float(score))
                if event is not None:
                    events.append(event)
        return events

    # Drivers

    def _mark_missing(self, count: int):
        self._missing.append((self._input_total, self._input_total + count))
        logger.warning(f"Input underrun: {count} samples missing at {self._input_total / self.sample_rate_hz:.2f}s")

    def process(self, chunk: Optional[np.ndarray], available_at: Optional[float] = None,
                gap_samples: int = 0) -> List[DetectionEvent]:
        """
        Push one chunk through every stage. None stands for gap_samples lost
        samples: zeros keep the timeline and the windows they touch get no score.
        """
        if chunk is None:
            self._mark_missing(gap_samples)
            chunk = np.zeros(gap_samples)
        available_at = self.tracker.clock() if available_at is None else available_at
        chunk = np.asarray(chunk, dtype=float)
        self._input_total += len(chunk)
        self.tracker.add_samples(len(chunk))
        rows = self.score_stage(self.envelope_stage(self.filter_stage(chunk)))
        events = self.detect_stage(rows) if rows is not None else []
        for _ in events:
            self.tracker.record_event(available_at)
        return events

    def finish(self) -> List[DetectionEvent]:
        """
        End of input: release the filter tail the group delay held back and
        the last partial block, then score any boundary they complete.
        """
        available_at = self.tracker.clock()
        owed = max(self._input_total - self._aligned_total, 0)
        with self.tracker.stage('filter'):
            tail = self._align(self.filter.flush())[:owed]
        with self.tracker.stage('analytic'):
            rows = self.analytic.process(tail)
            last, valid = self.analytic.flush()
            env = np.concatenate((np.abs(rows).ravel(), np.abs(last).ravel()[:valid]))
        scored = self.score_stage(env)
        events = self.detect_stage(scored) if scored is not None else []
        for _ in events:
            self.tracker.record_event(available_at)
        return events

    def run(self, input: SampleBuffer, chunk_samples: Optional[int] = None, pace: bool = False) -> List[DetectionEvent]:
        """
        Process a whole buffer in chunks.

        With pace, each chunk is released when its last sample would have
        been recorded, and latency counts from that moment.
        """
        self._check_rate(input)
        chunk_samples = chunk_samples or int(round(PIPELINE_CHUNK_S * self.sample_rate_hz))
        events: List[DetectionEvent] = []
        self.tracker.start()
        origin = self.tracker.clock()
        for start in range(0, len(input), chunk_samples):
            chunk = input.samples[start:start + chunk_samples]
            available_at = None
            if pace:
                available_at = origin + (start + len(chunk)) / self.sample_rate_hz
                delay = available_at - self.tracker.clock()
                if delay > 0:
                    time.sleep(delay)
            events.extend(self.process(chunk, available_at))
        events.extend(self.finish())
        self.tracker.stop()
        self._log_run(events)
        return events

    def run_threaded(self, input: SampleBuffer, chunk_samples: Optional[int] = None) -> List[DetectionEvent]:
        """Same decisions as run(), with the stages on threads joined by bounded FIFOs."""
        self._check_rate(input)
        chunk_samples = chunk_samples or int(round(PIPELINE_CHUNK_S * self.sample_rate_hz))
        events: List[DetectionEvent] = []
        pipeline = StreamPipeline(
            [self.filter_stage, self.envelope_stage, self.score_stage],
            sink=lambda rows: events.extend(self.detect_stage(rows)),
        )

        def chunks():
            for start in range(0, len(input), chunk_samples):
                chunk = input.samples[start:start + chunk_samples]
                self._input_total += len(chunk)
                self.tracker.add_samples(len(chunk))
                yield chunk

        self.tracker.start()
        pipeline.run(chunks())
        events.extend(self.finish())
        self.tracker.stop()
        self._log_run(events)
        return events

    def _check_rate(self, input: SampleBuffer):
        if input.sample_rate_hz != self.sample_rate_hz:
            raise ValueError(
                f"input sample rate {input.sample_rate_hz} Hz does not match the pipeline's {self.sample_rate_hz} Hz"
            )
        if self._input_total == 0:
            self.start_time_s = input.start_time_s

    def _log_run(self, events: List[DetectionEvent]):
        stops = sum(e.stop for e in events)
        logger.info(f"Detection run: {len(events)} events, {stops} stop decisions")
