"""Two-sided tabular CUSUM over a block-rate envelope."""

import logging
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from .constants import CUSUM_H_SIGMA, CUSUM_K_SIGMA, CUSUM_SIGMA_FLOOR_RATIO
from .models import CusumState

logger = logging.getLogger(__name__)


def cusum_step(state: CusumState, value: float) -> Tuple[CusumState, bool]:
    """
    Consume one value.

    Returns the new state and whether either sum exceeds the threshold
    after this value. The first alarm latches alarm_index.
    """
    s_plus = max(0.0, state.s_plus + (value - state.target_mean - state.reference_k))
    s_minus = max(0.0, state.s_minus + (state.target_mean - value - state.reference_k))
    alarm = s_plus > state.threshold_h or s_minus > state.threshold_h
    alarm_index = state.alarm_index
    if alarm and alarm_index is None:
        alarm_index = state.count
    new_state = replace(
        state, s_plus=s_plus, s_minus=s_minus, alarm_index=alarm_index, count=state.count + 1
    )
    return new_state, alarm


def cusum_reset(state: CusumState) -> CusumState:
    """Clear sums, latch and counter; keep target, k and h."""
    return CusumState(state.target_mean, state.reference_k, state.threshold_h)


def calibrate_cusum(
    values: np.ndarray,
    k_sigma: float = CUSUM_K_SIGMA,
    h_sigma: float = CUSUM_H_SIGMA,
    sigma_floor_ratio: float = CUSUM_SIGMA_FLOOR_RATIO,
) -> CusumState:
    """
    Fresh CusumState standardized against an obstacle-free segment.

    sigma is the segment's standard deviation, but never less than
    sigma_floor_ratio times the segment level.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError(f"calibration segment needs at least 2 values, got {values.size}")
    if k_sigma < 0 or h_sigma <= 0:
        raise ValueError(f"need k_sigma >= 0 and h_sigma > 0, got {k_sigma}, {h_sigma}")
    mean = float(values.mean())
    measured = float(values.std())
    sigma = max(measured, sigma_floor_ratio * abs(mean))
    if sigma == 0:
        raise ValueError("calibration segment is constant zero; cannot standardize")
    if sigma > measured:
        logger.debug(f"CUSUM sigma floored: measured {measured:.3g}, using {sigma:.3g}")
    return CusumState(mean, k_sigma * sigma, h_sigma * sigma)


def run_cusum(state: CusumState, values: np.ndarray) -> Tuple[CusumState, np.ndarray, Optional[int]]:
    """
    Step through values.

    Returns the final state, the per-value alarm mask and the index (into
    values) of the first alarm, or None.
    """
    values = np.asarray(values, dtype=float)
    mask = np.zeros(values.size, dtype=bool)
    s_plus, s_minus = state.s_plus, state.s_minus
    mean, k, h = state.target_mean, state.reference_k, state.threshold_h
    first = None
    # Same recursion as cusum_step without per-value dataclass copies
    for i, value in enumerate(values.tolist()):
        s_plus = max(0.0, s_plus + (value - mean - k))
        s_minus = max(0.0, s_minus + (mean - value - k))
        if s_plus > h or s_minus > h:
            mask[i] = True
            if first is None:
                first = i
    alarm_index = state.alarm_index
    if alarm_index is None and first is not None:
        alarm_index = state.count + first
    final = replace(state, s_plus=s_plus, s_minus=s_minus, alarm_index=alarm_index, count=state.count + values.size)
    return final, mask, first
