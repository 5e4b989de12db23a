"""Batched scoring for either classifier kind."""

import numpy as np

from scripts.lsw_sim.constants import SAMPLE_RATE_HZ

from .cnn import AuraCnn, cnn_forward
from .features import windows_features
from .models import SvmModel
from .svm import svm_predict

PREDICT_BATCH = 256


def predict_windows(model, windows, sample_rate_hz: float = SAMPLE_RATE_HZ) -> np.ndarray:
    """Positive-class scores in [0, 1], one per window."""
    windows = np.asarray(windows, dtype=float)
    if len(windows) == 0:
        return np.zeros(0)
    if isinstance(model, AuraCnn):
        parts = [
            np.atleast_1d(cnn_forward(model, windows[i:i + PREDICT_BATCH], mode='infer'))
            for i in range(0, len(windows), PREDICT_BATCH)
        ]
        return np.concatenate(parts)
    if isinstance(model, SvmModel):
        if windows.ndim == 3:
            # Real part of the analytic pair
            windows = windows[:, 0, :]
        return svm_predict(model, windows_features(windows, sample_rate_hz))
    raise TypeError(f"unsupported model type {type(model).__name__}")
