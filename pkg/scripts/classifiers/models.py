"""Classifier value types."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import WINDOW_LENGTH


@dataclass
class WindowSample:
    """
    One normalized 960-sample window, or a stack of them along the first axis.
    label is 1 positive, 0 negative, None unlabeled.
    """

    values: np.ndarray
    label: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape[-1] != WINDOW_LENGTH:
            raise ValueError(f"window must have {WINDOW_LENGTH} samples, got {self.values.shape[-1]}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("window values must be finite")
        if self.label not in (None, 0, 1):
            raise ValueError(f"label must be 0, 1 or None, got {self.label}")


@dataclass
class SvmModel:
    """
    RBF soft-margin SVM on standardized window features.

    margin(x) = sum_i alpha_i y_i K(s_i, z) + bias with z = (x - feature_mean) / feature_scale.
    """

    support_vectors: np.ndarray
    dual_coefficients: np.ndarray
    labels: np.ndarray
    bias: float
    rbf_gamma: float
    regularization_C: float
    feature_mean: np.ndarray
    feature_scale: np.ndarray

    def __post_init__(self):
        if self.rbf_gamma <= 0 or self.regularization_C <= 0:
            raise ValueError("rbf_gamma and regularization_C must be positive")
        self.support_vectors = np.atleast_2d(np.asarray(self.support_vectors, dtype=float))
        self.dual_coefficients = np.asarray(self.dual_coefficients, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if np.any(np.abs(self.dual_coefficients) > self.regularization_C * (1 + 1e-6)):
            raise ValueError("dual coefficients exceed C")

    @property
    def n_features(self) -> int:
        return len(self.feature_mean)

    @property
    def n_support(self) -> int:
        return len(self.dual_coefficients)
