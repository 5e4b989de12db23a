"""Value types of the signal-conditioning chain."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import (
    BANDPASS_CENTER_HZ,
    BANDPASS_HALFWIDTH_HZ,
    BANDPASS_STOP_DB,
    BANDPASS_TRANSITION_HZ,
)


@dataclass(frozen=True)
class BandpassSpec:
    """
    Narrow bandpass around the carrier.

    filter_length None lets the design pick the shortest odd length that
    reaches stop_attenuation_db.
    """

    center_hz: float = BANDPASS_CENTER_HZ
    passband_halfwidth_hz: float = BANDPASS_HALFWIDTH_HZ
    stop_attenuation_db: float = BANDPASS_STOP_DB
    filter_length: Optional[int] = None
    transition_hz: float = BANDPASS_TRANSITION_HZ

    def __post_init__(self):
        if self.passband_halfwidth_hz <= 0 or self.transition_hz <= 0:
            raise ValueError("passband halfwidth and transition width must be positive")
        if self.filter_length is not None and (self.filter_length < 3 or self.filter_length % 2 == 0):
            raise ValueError(f"filter_length must be odd and >= 3, got {self.filter_length}")

    def validate_for(self, sample_rate_hz: float):
        low = self.center_hz - self.passband_halfwidth_hz - self.transition_hz
        high = self.center_hz + self.passband_halfwidth_hz + self.transition_hz
        if low <= 0 or high >= sample_rate_hz / 2:
            raise ValueError(
                f"band {low:.0f}-{high:.0f} Hz does not fit in (0, {sample_rate_hz / 2:.0f}) Hz"
            )


@dataclass
class AnalyticFrame:
    """One block of the analytic signal; real part equals the input block."""

    block_length_L: int
    complex_samples: np.ndarray
    start_index: int
    valid_length: int
    padded: bool = False

    @property
    def envelope(self) -> np.ndarray:
        return np.abs(self.complex_samples[:self.valid_length])


@dataclass(frozen=True)
class CusumState:
    """Two-sided tabular CUSUM; count is the number of values consumed."""

    target_mean: float
    reference_k: float
    threshold_h: float
    s_plus: float = 0.0
    s_minus: float = 0.0
    alarm_index: Optional[int] = None
    count: int = 0
