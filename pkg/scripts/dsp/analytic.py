"""
Block-wise analytic signal, envelope and window normalization.

Each block of L samples is turned into its discrete analytic signal
independently: FFT, zero the negative frequencies, double the positive
ones, keep DC and Nyquist, inverse FFT. Blocks do not share state, so
every block edge carries some ripple; consumers that need a clean level
use the block interiors (decimate_blocks) and smooth over the carrier
phase-repeat period (smooth_blocks).
"""

import logging
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
from scipy import fft as sp_fft

from scripts.lsw_sim.models import SampleBuffer

from .constants import (
    BLOCK_LENGTH,
    INTERIOR_FRACTION,
    MAX_PHASE_REPEAT_BLOCKS,
    MIN_BLOCK_LENGTH,
    NORMALIZE_WINDOW_S,
    SIGMA_FLOOR,
)
from .models import AnalyticFrame

logger = logging.getLogger(__name__)


def one_sided_weights(length: int) -> np.ndarray:
    """Spectral weights turning a real block into its analytic signal."""
    h = np.zeros(length)
    h[0] = 1.0
    if length % 2 == 0:
        h[length // 2] = 1.0
        h[1:length // 2] = 2.0
    else:
        h[1:(length + 1) // 2] = 2.0
    return h


def analytic_rows(blocks: np.ndarray) -> np.ndarray:
    """Analytic signal of every row of a (n_blocks, L) real array."""
    blocks = np.asarray(blocks, dtype=float)
    spectrum = sp_fft.fft(blocks, axis=-1)
    quadrature = sp_fft.ifft(spectrum * one_sided_weights(blocks.shape[-1]), axis=-1).imag
    # Real part is the input itself
    return blocks + 1j * quadrature


def frame_array(samples: np.ndarray, L: int) -> Tuple[np.ndarray, int]:
    """Split samples into L-sample rows, zero-padding the last one; returns rows and valid tail length."""
    n = len(samples)
    n_blocks = max(1, -(-n // L))
    padded = np.zeros(n_blocks * L)
    padded[:n] = samples
    tail = n - (n_blocks - 1) * L
    return padded.reshape(n_blocks, L), tail


def analytic_blocks(input: SampleBuffer, L: int = BLOCK_LENGTH) -> List[AnalyticFrame]:
    """
    Analytic signal computed independently every L samples.

    A short final block is zero-padded and flagged; an input shorter than L
    gives a single padded block.
    """
    if L < MIN_BLOCK_LENGTH:
        raise ValueError(f"block length must be >= {MIN_BLOCK_LENGTH}, got {L}")
    if len(input) == 0:
        return []
    rows, tail = frame_array(input.samples, L)
    if len(input) < L:
        logger.warning(f"Input of {len(input)} samples shorter than block length {L}; single padded block")
    analytic = analytic_rows(rows)
    frames = []
    last = len(rows) - 1
    for i, row in enumerate(analytic):
        valid = tail if i == last else L
        frames.append(AnalyticFrame(L, row, i * L, valid, padded=valid < L))
    return frames


def envelope(frames: Sequence[AnalyticFrame], sample_rate_hz: float = 96000.0, start_time_s: float = 0.0) -> SampleBuffer:
    """Concatenated |x_a| of contiguous frames (padding excluded)."""
    expected = frames[0].start_index if frames else 0
    parts = []
    for frame in frames:
        if frame.start_index != expected:
            raise ValueError(f"frames not contiguous at sample {frame.start_index}, expected {expected}")
        parts.append(frame.envelope)
        expected += frame.block_length_L
    values = np.concatenate(parts) if parts else np.zeros(0)
    return SampleBuffer(values, sample_rate_hz, start_time_s)


def envelope_of(input: SampleBuffer, L: int = BLOCK_LENGTH) -> SampleBuffer:
    """Envelope of a whole buffer through the block analytic signal."""
    rows, tail = frame_array(input.samples, L)
    values = np.abs(analytic_rows(rows)).reshape(-1)[:len(input)]
    return SampleBuffer(values, input.sample_rate_hz, input.start_time_s, input.carrier_hz)


def normalize_windows(
    input: SampleBuffer,
    window_s: float = NORMALIZE_WINDOW_S,
    return_flags: bool = False,
):
    """
    Z-score each non-overlapping window of window_s seconds.

    A trailing partial window is normalized on its own samples. Constant
    windows become zeros and are reported in the flags.
    """
    if window_s <= 0:
        raise ValueError(f"window_s must be positive, got {window_s}")
    size = int(round(window_s * input.sample_rate_hz))
    if size < 1:
        raise ValueError(f"window_s must cover at least one sample, got {window_s} at {input.sample_rate_hz:g} Hz")
    out = np.zeros(len(input))
    flagged = []
    for w, start in enumerate(range(0, len(input), size)):
        window = input.samples[start:start + size]
        if np.ptp(window) == 0:
            flagged.append(w)
            continue
        sigma = max(float(np.std(window)), SIGMA_FLOOR)
        out[start:start + size] = (window - window.mean()) / sigma
    if flagged:
        logger.warning(f"{len(flagged)} constant normalization window(s) set to zero")
    result = SampleBuffer(out, input.sample_rate_hz, input.start_time_s, input.carrier_hz)
    if return_flags:
        return result, flagged
    return result


def decimate_blocks(block_envelopes: np.ndarray, interior: float = INTERIOR_FRACTION) -> np.ndarray:
    """One value per block: the mean envelope over the block's central fraction."""
    block_envelopes = np.atleast_2d(block_envelopes)
    L = block_envelopes.shape[1]
    keep = max(1, int(round(L * interior)))
    lo = (L - keep) // 2
    return block_envelopes[:, lo:lo + keep].mean(axis=1)


def phase_repeat_blocks(frequency_hz: float, sample_rate_hz: float, L: int = BLOCK_LENGTH) -> int:
    """Number of blocks after which the carrier phase at a block start repeats."""
    periods_per_block = Fraction(frequency_hz * L / sample_rate_hz).limit_denominator(1000)
    repeat = periods_per_block.denominator
    if repeat > MAX_PHASE_REPEAT_BLOCKS:
        logger.warning(f"Carrier phase repeats every {repeat} blocks; capping smoothing at {MAX_PHASE_REPEAT_BLOCKS}")
        repeat = MAX_PHASE_REPEAT_BLOCKS
    return repeat


class BlockSmoother:
    """Trailing running mean over P block values, carried across calls."""

    def __init__(self, period: int):
        if period < 1:
            raise ValueError(f"smoothing period must be >= 1, got {period}")
        self.period = period
        self.history = np.zeros(0)

    def process(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        joined = np.concatenate((self.history, values))
        csum = np.concatenate(([0.0], np.cumsum(joined)))
        ends = np.arange(len(self.history) + 1, len(joined) + 1)
        starts = np.maximum(ends - self.period, 0)
        out = (csum[ends] - csum[starts]) / (ends - starts)
        self.history = joined[-(self.period - 1):] if self.period > 1 else np.zeros(0)
        return out


def smooth_blocks(values: np.ndarray, period: int) -> np.ndarray:
    """Trailing mean over `period` blocks; the first entries average what is available."""
    return BlockSmoother(period).process(values)


class AnalyticStream:
    """
    Cuts a sample stream into L-sample blocks and returns their analytic rows.

    Leftover samples wait for the next chunk; flush() pads the remainder.
    """

    def __init__(self, L: int = BLOCK_LENGTH):
        if L < MIN_BLOCK_LENGTH:
            raise ValueError(f"block length must be >= {MIN_BLOCK_LENGTH}, got {L}")
        self.L = L
        self.pending = np.zeros(0)
        self.blocks_out = 0

    def process(self, chunk: np.ndarray) -> np.ndarray:
        joined = np.concatenate((self.pending, np.asarray(chunk, dtype=float)))
        n_full = len(joined) // self.L
        self.pending = joined[n_full * self.L:]
        if n_full == 0:
            return np.zeros((0, self.L), dtype=complex)
        self.blocks_out += n_full
        return analytic_rows(joined[:n_full * self.L].reshape(n_full, self.L))

    def flush(self) -> Tuple[np.ndarray, int]:
        """Analytic row of the zero-padded remainder and its valid length."""
        valid = len(self.pending)
        if valid == 0:
            return np.zeros((0, self.L), dtype=complex), 0
        row = np.zeros(self.L)
        row[:valid] = self.pending
        self.pending = np.zeros(0)
        self.blocks_out += 1
        return analytic_rows(row[None, :]), valid
