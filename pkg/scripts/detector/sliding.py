"""
Sliding-window detector over a stream of per-window classifier scores.

Scores arrive one per window_duration_s. Once N slots are buffered an event
is emitted every slide_s; the event at time t averages the scores whose
windows end in (t - N * window_duration_s, t]. A missing score (None) leaves
a gap: the window is judged on the scores present when at least half are
there (marked degraded) and skipped otherwise.

A stop decision latches the detector until reset() is called.
"""

import logging
import math
from collections import deque
from typing import Callable, Iterable, List, Optional

from .constants import DEGRADED_MIN_FRACTION
from .models import DetectionEvent, DetectorConfig

logger = logging.getLogger(__name__)

Subscriber = Callable[[DetectionEvent], None]


class SlidingDetector:
    """Per-stream detector state; one consumer, any number of subscribers."""

    def __init__(self, cfg: DetectorConfig = DetectorConfig(), subscribers: Iterable[Subscriber] = ()):
        self.cfg = cfg
        self.subscribers: List[Subscriber] = list(subscribers)
        self.buffer = deque(maxlen=cfg.window_count_N)
        self.slots = 0
        self.latched = False
        self.skipped = 0

    def subscribe(self, subscriber: Subscriber):
        self.subscribers.append(subscriber)

    def reset(self):
        """Release the latch; buffered scores are kept."""
        if self.latched:
            logger.info("Detector latch released")
        self.latched = False

    def clear(self):
        """Forget buffered scores and the latch (start of a new stream)."""
        self.buffer.clear()
        self.slots = 0
        self.latched = False
        self.skipped = 0

    def push(self, time_s: float, score: Optional[float]) -> Optional[DetectionEvent]:
        """
        Add the score of the window ending at time_s (None for a gap).

        Returns the event emitted at this slot, if any.
        """
        if score is not None:
            score = float(score)
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"score must lie in [0, 1], got {score}")
        self.buffer.append(score)
        self.slots += 1
        n = self.cfg.window_count_N
        if self.slots < n or (self.slots - n) % self.cfg.slide_windows:
            return None
        return self._emit(time_s)

    def _emit(self, time_s: float) -> Optional[DetectionEvent]:
        present = [s for s in self.buffer if s is not None]
        n = self.cfg.window_count_N
        if len(present) < math.ceil(DEGRADED_MIN_FRACTION * n):
            self.skipped += 1
            logger.warning(f"Skipping detector window at {time_s:.2f}s: {len(present)}/{n} scores present")
            return None
        degraded = len(present) < n
        if degraded:
            logger.warning(f"Degraded detector window at {time_s:.2f}s: {len(present)}/{n} scores present")
        mean = math.fsum(present) / len(present)
        stop = mean > self.cfg.threshold
        triggered = stop and not self.latched
        if triggered:
            self.latched = True
            logger.info(f"Stop at {time_s:.2f}s: mean score {mean:.3f} > {self.cfg.threshold}")
        event = DetectionEvent(
            time_s=time_s,
            mean_score=mean,
            threshold=self.cfg.threshold,
            stop=stop,
            n_scores=len(present),
            degraded=degraded,
            latched=self.latched,
            triggered=triggered,
        )
        for subscriber in self.subscribers:
            subscriber(event)
        return event


def stream_detect(
    score_stream: Iterable[Optional[float]],
    cfg: DetectorConfig = DetectorConfig(),
    start_time_s: float = 0.0,
) -> List[DetectionEvent]:
    """Run a fresh detector over scores of consecutive windows starting at start_time_s."""
    detector = SlidingDetector(cfg)
    events = []
    for k, score in enumerate(score_stream):
        event = detector.push(start_time_s + (k + 1) * cfg.window_duration_s, score)
        if event is not None:
            events.append(event)
    return events
