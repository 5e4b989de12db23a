"""Shared pytest fixtures and markers."""

import numpy as np
import pytest

from scripts.classifiers import CnnConfig, WindowSource


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance-style runs (deselect with -m 'not slow')")


@pytest.fixture
def tiny_config():
    """Two layers of eight channels over 64-sample windows: 64 -> 29 -> 12."""
    return CnnConfig(window_length=64, layers=2, channels=8)


def make_toy_sequences(seed: int = 0, count: int = 4, length: int = 2000):
    """Positives carry a strong periodic pattern, negatives are faint noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    positives = [3 * np.sin(2 * np.pi * t / 8 + rng.uniform(0, 2 * np.pi)) + rng.normal(0, 0.3, length)
                 for _ in range(count)]
    negatives = [rng.normal(0, 0.1, length) for _ in range(count)]
    return positives, negatives


@pytest.fixture
def toy_source():
    positives, negatives = make_toy_sequences()
    return WindowSource(positives, negatives, window_length=64)
