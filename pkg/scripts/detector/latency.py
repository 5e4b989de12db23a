"""Per-stage timing of the detection pipeline and the response-budget report."""

import logging
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Dict, List

import numpy as np

from .constants import RESPONSE_BUDGET_S, SYSTEM_RESPONSE_S

logger = logging.getLogger(__name__)


class LatencyTracker:
    """
    Collects stage durations, per-event latencies and throughput.

    An event's latency runs from the moment its last input sample was
    available to the moment it was emitted.
    """

    def __init__(self, clock=time.perf_counter):
        self.clock = clock
        self.stage_times: Dict[str, List[float]] = defaultdict(list)
        self.event_latencies: List[float] = []
        self.samples = 0
        self.started = None
        self.finished = None

    def start(self):
        self.started = self.clock()

    def stop(self):
        self.finished = self.clock()

    @contextmanager
    def stage(self, name: str):
        begin = self.clock()
        try:
            yield
        finally:
            self.stage_times[name].append(self.clock() - begin)

    def add_samples(self, count: int):
        self.samples += count

    def record_event(self, available_at: float):
        self.event_latencies.append(max(0.0, self.clock() - available_at))

    @property
    def elapsed_s(self) -> float:
        if self.started is None:
            return 0.0
        end = self.finished if self.finished is not None else self.clock()
        return end - self.started


@dataclass
class BudgetReport:
    stage_mean_ms: Dict[str, float] = field(default_factory=dict)
    stage_max_ms: Dict[str, float] = field(default_factory=dict)
    events: int = 0
    latency_mean_ms: float = 0.0
    latency_max_ms: float = 0.0
    budget_ms: float = RESPONSE_BUDGET_S * 1000
    samples_per_s: float = 0.0
    realtime_factor: float = 0.0
    passed: bool = True
    detection_distance_m: float = 0.0
    response_time_s: float = SYSTEM_RESPONSE_S
    v_max_m_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def response_budget_check(
    tracker: LatencyTracker,
    sample_rate_hz: float,
    detection_distance_m: float = 0.183,
    response_time_s: float = SYSTEM_RESPONSE_S,
    budget_s: float = RESPONSE_BUDGET_S,
) -> BudgetReport:
    """
    Summarize a run: passes when no event took longer than budget_s after
    its final sample. v_max is the fastest approach the system still stops
    for, given the detection distance and response time.
    """
    from scripts.evaluation.metrics import max_speed

    report = BudgetReport(budget_ms=budget_s * 1000, detection_distance_m=detection_distance_m,
                          response_time_s=response_time_s)
    for name, times in tracker.stage_times.items():
        report.stage_mean_ms[name] = float(np.mean(times) * 1000)
        report.stage_max_ms[name] = float(np.max(times) * 1000)
    latencies = np.asarray(tracker.event_latencies)
    report.events = int(latencies.size)
    if latencies.size:
        report.latency_mean_ms = float(latencies.mean() * 1000)
        report.latency_max_ms = float(latencies.max() * 1000)
    elapsed = tracker.elapsed_s
    if elapsed > 0:
        report.samples_per_s = tracker.samples / elapsed
        report.realtime_factor = report.samples_per_s / sample_rate_hz
    report.passed = report.latency_max_ms <= report.budget_ms
    report.v_max_m_s = max_speed(detection_distance_m, response_time_s)
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(
        level,
        f"Response budget {'met' if report.passed else 'exceeded'}: max event latency "
        f"{report.latency_max_ms:.1f} ms (budget {report.budget_ms:.0f} ms), "
        f"{report.realtime_factor:.1f}x real time, v_max {report.v_max_m_s * 100:.1f} cm/s",
    )
    return report
