"""Detector configuration and events."""

import math
from dataclasses import asdict, dataclass

from .constants import SLIDE_S, THRESHOLD, WINDOW_COUNT, WINDOW_DURATION_S


@dataclass(frozen=True)
class DetectorConfig:
    window_count_N: int = WINDOW_COUNT
    window_duration_s: float = WINDOW_DURATION_S
    slide_s: float = SLIDE_S
    threshold: float = THRESHOLD

    def __post_init__(self):
        if self.window_count_N < 1:
            raise ValueError(f"window_count_N must be >= 1, got {self.window_count_N}")
        if self.window_duration_s <= 0:
            raise ValueError(f"window_duration_s must be positive, got {self.window_duration_s}")
        if not 0 <= self.threshold <= 1:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")
        ratio = self.slide_s / self.window_duration_s
        if self.slide_s <= 0 or round(ratio) < 1 or not math.isclose(ratio, round(ratio), rel_tol=1e-9):
            raise ValueError(
                f"slide_s ({self.slide_s}) must be a positive multiple of window_duration_s ({self.window_duration_s})"
            )

    @property
    def slide_windows(self) -> int:
        return int(round(self.slide_s / self.window_duration_s))

    @property
    def span_s(self) -> float:
        return self.window_count_N * self.window_duration_s

    @property
    def max_events_per_score(self) -> int:
        return math.ceil(self.window_count_N / self.slide_windows)


@dataclass(frozen=True)
class DetectionEvent:
    """
    One detector decision at time_s (right edge of the averaged windows).

    stop is the decision of this window alone. latched tells whether the
    detector is frozen after this event; triggered marks the event that
    engaged the latch.
    """

    time_s: float
    mean_score: float
    threshold: float
    stop: bool
    n_scores: int = WINDOW_COUNT
    degraded: bool = False
    latched: bool = False
    triggered: bool = False

    def __post_init__(self):
        if self.stop != (self.mean_score > self.threshold):
            raise ValueError("stop must equal mean_score > threshold")

    def to_record(self) -> dict:
        record = asdict(self)
        record['time_s'] = round(self.time_s, 6)
        return record
