"""
Sliding-window detector: averages N per-window classifier scores every
slide step and emits stop events.

Usage:
    from scripts.detector import DetectorConfig, SlidingDetector, JsonLinesSink, DetectionPipeline

    pipeline = DetectionPipeline(model, DetectorConfig(threshold=0.717), subscribers=[JsonLinesSink()])
    events = pipeline.run(received)
"""

from .latency import BudgetReport, LatencyTracker, response_budget_check
from .models import DetectionEvent, DetectorConfig
from .pipeline import DetectionPipeline
from .sinks import EventCollector, JsonLinesSink, StopChannelSink
from .sliding import SlidingDetector, stream_detect
from .window import detect_window

__all__ = [
    'DetectionEvent',
    'DetectorConfig',
    'detect_window',
    'SlidingDetector',
    'stream_detect',
    'EventCollector',
    'JsonLinesSink',
    'StopChannelSink',
    'BudgetReport',
    'LatencyTracker',
    'response_budget_check',
    'DetectionPipeline',
]
