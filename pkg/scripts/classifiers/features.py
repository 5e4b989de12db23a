"""Eight-value summaries of normalized envelope windows for the SVM."""

import numpy as np
from scipy.signal import find_peaks

from scripts.lsw_sim.constants import SAMPLE_RATE_HZ

from .constants import N_FEATURES


def window_features(window, sample_rate_hz: float = SAMPLE_RATE_HZ) -> np.ndarray:
    """mean, std, min, max, peak count, dominant modulation frequency, energy, slope."""
    x = np.asarray(window, dtype=float)
    if x.ndim != 1 or x.size < 4:
        raise ValueError(f"expected a 1-D window of at least 4 samples, got shape {x.shape}")
    peaks, _ = find_peaks(x)
    spectrum = np.abs(np.fft.rfft(x - x.mean()))
    freqs = np.fft.rfftfreq(x.size, 1 / sample_rate_hz)
    dominant = freqs[1 + int(np.argmax(spectrum[1:]))]
    t = np.arange(x.size) / sample_rate_hz
    slope = np.polyfit(t, x, 1)[0]
    return np.array([
        x.mean(),
        x.std(),
        x.min(),
        x.max(),
        float(len(peaks)),
        dominant,
        np.mean(x ** 2),
        slope,
    ])


def windows_features(windows, sample_rate_hz: float = SAMPLE_RATE_HZ) -> np.ndarray:
    windows = np.atleast_2d(np.asarray(windows, dtype=float))
    if windows.shape[0] == 0:
        return np.zeros((0, N_FEATURES))
    return np.stack([window_features(w, sample_rate_hz) for w in windows])
