"""
CUSUM proximity monitor on the block-rate envelope.

bandpass -> analytic blocks -> block interior means -> P-block smoothing ->
warm-up skip -> 1 s calibration -> CUSUM.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from scripts.lsw_sim.models import SampleBuffer

from .analytic import AnalyticStream, BlockSmoother, decimate_blocks, phase_repeat_blocks
from .bandpass import BandpassFilter, design_bandpass, group_delay_samples
from .constants import (
    BLOCK_LENGTH,
    CUSUM_CALIBRATION_S,
    CUSUM_H_SIGMA,
    CUSUM_K_SIGMA,
    CUSUM_SIGMA_FLOOR_RATIO,
    INTERIOR_FRACTION,
)
from .cusum import calibrate_cusum, run_cusum
from .models import BandpassSpec, CusumState

logger = logging.getLogger(__name__)


@dataclass
class MonitorResult:
    """Outcome of one monitored stream; block indices count from the first filtered block."""

    alarm_block: Optional[int]
    alarm_time_s: Optional[float]
    state: Optional[CusumState]
    block_times_s: np.ndarray
    block_values: np.ndarray
    alarm_mask: np.ndarray
    calibration_blocks: range = field(default_factory=lambda: range(0))

    @property
    def alarmed(self) -> bool:
        return self.alarm_block is not None


def block_trace(
    input: SampleBuffer,
    L: int = BLOCK_LENGTH,
    period: Optional[int] = None,
    interior: float = INTERIOR_FRACTION,
):
    """
    Smoothed block-rate envelope of an unfiltered buffer.

    Returns (block end times, values). period defaults to the carrier
    phase-repeat count when the buffer knows its carrier, else 1.
    """
    if period is None:
        period = phase_repeat_blocks(input.carrier_hz, input.sample_rate_hz, L) if input.carrier_hz else 1
    stream = AnalyticStream(L)
    rows = stream.process(input.samples)
    values = BlockSmoother(period).process(decimate_blocks(np.abs(rows), interior))
    ends = input.start_time_s + (np.arange(len(values)) + 1) * L / input.sample_rate_hz
    return ends, values


class EnvelopeDetector:
    """
    Streaming CUSUM detector.

    Feed chunks with process(); finish() returns the result.
    The first ceil((M-1)/L) + P blocks cover the filter transient and the
    smoother fill and are skipped; the next calibration_s seconds set the
    CUSUM target and scale.
    """

    def __init__(
        self,
        sample_rate_hz: float,
        spec: BandpassSpec = BandpassSpec(),
        L: int = BLOCK_LENGTH,
        calibration_s: float = CUSUM_CALIBRATION_S,
        k_sigma: float = CUSUM_K_SIGMA,
        h_sigma: float = CUSUM_H_SIGMA,
        sigma_floor_ratio: float = CUSUM_SIGMA_FLOOR_RATIO,
        kernel: Optional[np.ndarray] = None,
        start_time_s: float = 0.0,
    ):
        self.sample_rate_hz = sample_rate_hz
        self.kernel = design_bandpass(spec, sample_rate_hz) if kernel is None else np.asarray(kernel, dtype=float)
        self.L = L
        self.period = phase_repeat_blocks(spec.center_hz, sample_rate_hz, L)
        self.warmup_blocks = math.ceil((len(self.kernel) - 1) / L) + self.period
        self.calibration_blocks = int(round(calibration_s * sample_rate_hz / L))
        if self.calibration_blocks < 2:
            raise ValueError(f"calibration of {calibration_s} s gives fewer than 2 blocks")
        self.k_sigma = k_sigma
        self.h_sigma = h_sigma
        self.sigma_floor_ratio = sigma_floor_ratio
        # Filtered sample n lines up with input sample n - (M-1)/2
        self.time_offset_s = start_time_s - group_delay_samples(self.kernel) / sample_rate_hz

        self.filter = BandpassFilter(self.kernel)
        self.analytic = AnalyticStream(L)
        self.smoother = BlockSmoother(self.period)
        self.values: List[np.ndarray] = []
        self.masks: List[np.ndarray] = []
        self.n_blocks = 0
        self.state: Optional[CusumState] = None
        self.pending_calibration: List[float] = []
        self.alarm_block: Optional[int] = None

    def block_end_time(self, block: int) -> float:
        return self.time_offset_s + (block + 1) * self.L / self.sample_rate_hz

    def _consume_blocks(self, rows: np.ndarray):
        if len(rows) == 0:
            return
        smoothed = self.smoother.process(decimate_blocks(np.abs(rows)))
        first = self.n_blocks
        self.n_blocks += len(smoothed)
        mask = np.zeros(len(smoothed), dtype=bool)
        calibration_end = self.warmup_blocks + self.calibration_blocks

        idx = np.arange(first, first + len(smoothed))
        if self.state is None:
            in_cal = (idx >= self.warmup_blocks) & (idx < calibration_end)
            self.pending_calibration.extend(smoothed[in_cal].tolist())
            if len(self.pending_calibration) >= self.calibration_blocks:
                self.state = calibrate_cusum(
                    np.array(self.pending_calibration),
                    self.k_sigma,
                    self.h_sigma,
                    self.sigma_floor_ratio,
                )
                logger.debug(
                    f"CUSUM calibrated: mean {self.state.target_mean:.6g}, "
                    f"k {self.state.reference_k:.3g}, h {self.state.threshold_h:.3g}"
                )
        if self.state is not None:
            live = idx >= calibration_end
            if np.any(live):
                self.state, live_mask, hit = run_cusum(self.state, smoothed[live])
                mask[live] = live_mask
                if hit is not None and self.alarm_block is None:
                    self.alarm_block = int(idx[live][hit])
                    logger.info(f"CUSUM alarm at block {self.alarm_block} ({self.block_end_time(self.alarm_block):.3f} s)")
        self.values.append(smoothed)
        self.masks.append(mask)

    def process(self, chunk: np.ndarray):
        self._consume_blocks(self.analytic.process(self.filter.process(chunk)))

    def finish(self) -> MonitorResult:
        """
        Report on everything consumed so far.

        The filter tail and a trailing partial block are dropped: both would
        show the carrier ringing down rather than the surface.
        """
        self.filter.reset()
        self.analytic.pending = np.zeros(0)
        if self.state is None:
            logger.warning(
                f"Stream too short for CUSUM: {self.n_blocks} blocks, "
                f"need {self.warmup_blocks + self.calibration_blocks}"
            )
        values = np.concatenate(self.values) if self.values else np.zeros(0)
        mask = np.concatenate(self.masks) if self.masks else np.zeros(0, dtype=bool)
        times = self.block_end_time(np.arange(len(values)))
        alarm_time = None if self.alarm_block is None else float(self.block_end_time(self.alarm_block))
        return MonitorResult(
            alarm_block=self.alarm_block,
            alarm_time_s=alarm_time,
            state=self.state,
            block_times_s=times,
            block_values=values,
            alarm_mask=mask,
            calibration_blocks=range(self.warmup_blocks, self.warmup_blocks + self.calibration_blocks),
        )

    def run(self, input: SampleBuffer, chunk_samples: Optional[int] = None) -> MonitorResult:
        """Process a whole buffer, optionally in chunks."""
        if input.sample_rate_hz != self.sample_rate_hz:
            raise ValueError(f"buffer sampled at {input.sample_rate_hz} Hz, detector built for {self.sample_rate_hz} Hz")
        step = chunk_samples or max(len(input), 1)
        for start in range(0, len(input), step):
            self.process(input.samples[start:start + step])
        return self.finish()


def detect_proximity(input: SampleBuffer, spec: BandpassSpec = BandpassSpec(), **kwargs) -> MonitorResult:
    """One-shot CUSUM detection over a buffer."""
    detector = EnvelopeDetector(input.sample_rate_hz, spec, start_time_s=input.start_time_s, **kwargs)
    return detector.run(input)
