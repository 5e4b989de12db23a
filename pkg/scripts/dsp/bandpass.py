"""Linear-phase FIR bandpass at the excitation frequency."""

import logging

import numpy as np
from scipy import signal

from scripts.lsw_sim.models import SampleBuffer

from .constants import (
    BANDPASS_DESIGN_MARGIN_DB,
    PASSBAND_TOLERANCE_DB,
    STOPBAND_CHECK_HZ,
)
from .models import BandpassSpec

logger = logging.getLogger(__name__)


class FilterDesignError(ValueError):
    """The requested response cannot be met."""


def response_db(taps: np.ndarray, freqs_hz, sample_rate_hz: float) -> np.ndarray:
    """Magnitude response of the taps in dB at the given frequencies."""
    _, h = signal.freqz(taps, worN=np.atleast_1d(np.asarray(freqs_hz, dtype=float)), fs=sample_rate_hz)
    return 20 * np.log10(np.maximum(np.abs(h), 1e-300))


def design_bandpass(spec: BandpassSpec, sample_rate_hz: float) -> np.ndarray:
    """
    Kaiser-window bandpass taps.

    The passband spans center +/- halfwidth; the stopband starts one
    transition width further out. Raises FilterDesignError when the
    response misses the passband tolerance or the stopband attenuation.
    """
    spec.validate_for(sample_rate_hz)
    nyquist = sample_rate_hz / 2
    numtaps, beta = signal.kaiserord(
        spec.stop_attenuation_db + BANDPASS_DESIGN_MARGIN_DB, spec.transition_hz / nyquist
    )
    numtaps |= 1
    if spec.filter_length is not None:
        if spec.filter_length < numtaps:
            raise FilterDesignError(
                f"{spec.stop_attenuation_db} dB stopband needs {numtaps} taps, "
                f"filter_length is {spec.filter_length}"
            )
        numtaps = spec.filter_length

    edge = spec.passband_halfwidth_hz + spec.transition_hz / 2
    taps = signal.firwin(
        numtaps,
        [spec.center_hz - edge, spec.center_hz + edge],
        window=('kaiser', beta),
        pass_zero=False,
        fs=sample_rate_hz,
    )

    passband = response_db(
        taps,
        [spec.center_hz - spec.passband_halfwidth_hz, spec.center_hz, spec.center_hz + spec.passband_halfwidth_hz],
        sample_rate_hz,
    )
    if np.any(passband < -PASSBAND_TOLERANCE_DB):
        raise FilterDesignError(f"passband droops to {passband.min():.2f} dB")

    checks = [f for f in STOPBAND_CHECK_HZ if f < nyquist]
    stopband = response_db(taps, checks, sample_rate_hz)
    if np.any(stopband > -spec.stop_attenuation_db):
        raise FilterDesignError(
            f"stopband only {-stopband.max():.1f} dB down, {spec.stop_attenuation_db} dB required"
        )

    logger.debug(f"Bandpass {spec.center_hz:.0f} Hz: {numtaps} taps, kaiser beta {beta:.2f}")
    return taps


def group_delay_samples(taps: np.ndarray) -> float:
    return (len(taps) - 1) / 2


def apply_filter(kernel: np.ndarray, input: SampleBuffer) -> SampleBuffer:
    """
    Full linear convolution of the input with the kernel.

    The output is len(input) + len(kernel) - 1 samples long and its start
    time is moved back by the group delay, so output sample k lines up with
    the input instant of sample k - (len(kernel) - 1) / 2.
    """
    kernel = np.asarray(kernel, dtype=float)
    if kernel.size == 0:
        raise ValueError("filter kernel is empty")
    if len(input) == 0:
        return SampleBuffer(np.zeros(0), input.sample_rate_hz, input.start_time_s, input.carrier_hz)
    out = signal.oaconvolve(input.samples, kernel, mode='full')
    start = input.start_time_s - group_delay_samples(kernel) / input.sample_rate_hz
    return SampleBuffer(out, input.sample_rate_hz, start, input.carrier_hz)


def filter_aligned(kernel: np.ndarray, input: SampleBuffer) -> SampleBuffer:
    """Filtered signal trimmed to the input's own time span."""
    full = apply_filter(kernel, input)
    delay = (len(kernel) - 1) // 2
    samples = full.samples[delay:delay + len(input)]
    return SampleBuffer(samples, input.sample_rate_hz, input.start_time_s, input.carrier_hz)


class BandpassFilter:
    """
    Streaming form of apply_filter.

    Keeps the last len(kernel) - 1 input samples between chunks; feeding a
    signal in pieces and then calling flush() reproduces the one-shot output.
    """

    def __init__(self, kernel: np.ndarray):
        self.kernel = np.asarray(kernel, dtype=float)
        if self.kernel.size == 0:
            raise ValueError("filter kernel is empty")
        self.buf = np.zeros(len(self.kernel) - 1)
        self.samples_in = 0

    def process(self, chunk: np.ndarray) -> np.ndarray:
        chunk = np.asarray(chunk, dtype=float)
        if chunk.size == 0:
            return np.zeros(0)
        unfiltered = np.concatenate((self.buf, chunk))
        self.buf = unfiltered[len(unfiltered) - (len(self.kernel) - 1):]
        self.samples_in += chunk.size
        return signal.oaconvolve(unfiltered, self.kernel, mode='valid')

    def flush(self) -> np.ndarray:
        """Emit the tail that a full convolution has past the last input sample."""
        tail = self.process(np.zeros(len(self.kernel) - 1))
        self.reset()
        return tail

    def reset(self):
        self.buf = np.zeros(len(self.kernel) - 1)
        self.samples_in = 0
