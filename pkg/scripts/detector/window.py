"""Single-window decision: average N scores and compare to the threshold."""

import math
from typing import Sequence

import numpy as np

from .models import DetectionEvent, DetectorConfig


def check_scores(scores) -> np.ndarray:
    values = np.asarray(scores, dtype=float)
    if values.ndim != 1:
        raise ValueError(f"scores must be one-dimensional, got shape {values.shape}")
    if not np.all(np.isfinite(values)) or np.any((values < 0) | (values > 1)):
        raise ValueError("scores must lie in [0, 1]")
    return values


def detect_window(
    scores: Sequence[float],
    cfg: DetectorConfig = DetectorConfig(),
    time_s: float = 0.0,
) -> DetectionEvent:
    """Stop exactly when the mean score is strictly above the threshold."""
    values = check_scores(scores)
    if len(values) != cfg.window_count_N:
        raise ValueError(f"expected {cfg.window_count_N} scores, got {len(values)}")
    # Correctly rounded sum: the mean does not depend on score order
    mean = math.fsum(values) / len(values)
    return DetectionEvent(
        time_s=time_s,
        mean_score=mean,
        threshold=cfg.threshold,
        stop=mean > cfg.threshold,
        n_scores=len(values),
    )
