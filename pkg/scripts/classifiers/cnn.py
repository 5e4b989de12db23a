"""
Fully-convolutional 1D CNN over 0.01 s windows.

Each layer is a valid-padding Conv1d (kernel 7, stride 2) followed by
batch normalization and ReLU; a linear layer maps the flattened features
to two logits. With the default shape the lengths run
960 -> 477 -> 236 -> 115 -> 55 -> 25 -> 10 -> 2 and the linear layer sees
2 x 256 = 512 features.
"""

import logging
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np
import torch
import torch.nn as nn

from .constants import (
    BN_MOMENTUM,
    CNN_CHANNELS,
    CNN_IN_CHANNELS,
    CNN_KERNEL_SIZE,
    CNN_LAYERS,
    CNN_STRIDE,
    N_CLASSES,
    POSITIVE_CLASS,
    WINDOW_LENGTH,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CnnConfig:
    """Architecture; in_channels=2 takes real and imaginary analytic samples."""

    window_length: int = WINDOW_LENGTH
    layers: int = CNN_LAYERS
    channels: int = CNN_CHANNELS
    kernel_size: int = CNN_KERNEL_SIZE
    stride: int = CNN_STRIDE
    in_channels: int = CNN_IN_CHANNELS
    bn_momentum: float = BN_MOMENTUM
    n_classes: int = N_CLASSES

    def __post_init__(self):
        if self.in_channels not in (1, 2):
            raise ValueError(f"in_channels must be 1 or 2, got {self.in_channels}")
        if min(self.layers, self.channels, self.kernel_size, self.stride) < 1:
            raise ValueError("layers, channels, kernel_size and stride must be >= 1")
        layer_lengths(self)

    def descriptor(self) -> dict:
        return asdict(self)

    @classmethod
    def from_descriptor(cls, descriptor: dict) -> 'CnnConfig':
        try:
            return cls(**descriptor)
        except TypeError as e:
            raise ValueError(f"bad CNN descriptor {descriptor}: {e}") from e


def layer_lengths(config: CnnConfig) -> List[int]:
    """Sequence length before the first layer and after each layer."""
    lengths = [config.window_length]
    for i in range(config.layers):
        n = (lengths[-1] - config.kernel_size) // config.stride + 1
        if n < 1:
            raise ValueError(
                f"layer {i + 1} output would be empty: input {lengths[-1]}, kernel {config.kernel_size}"
            )
        lengths.append(n)
    return lengths


class AuraCnn(nn.Module):
    """Proximity classifier; forward returns logits of shape (batch, 2)."""

    def __init__(self, config: CnnConfig = CnnConfig()):
        super().__init__()
        self.config = config
        blocks = []
        width = config.in_channels
        for _ in range(config.layers):
            blocks.append(nn.Sequential(
                nn.Conv1d(width, config.channels, config.kernel_size, stride=config.stride),
                nn.BatchNorm1d(config.channels, momentum=config.bn_momentum),
                nn.ReLU(),
            ))
            width = config.channels
        self.convs = nn.ModuleList(blocks)
        self.flat_features = layer_lengths(config)[-1] * config.channels
        self.linear = nn.Linear(self.flat_features, config.n_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() == 2:
            x = x.unsqueeze(1)
        if x.dim() != 3 or x.shape[1] != self.config.in_channels or x.shape[2] != self.config.window_length:
            raise ValueError(
                f"expected windows of shape (batch, {self.config.in_channels}, {self.config.window_length}), "
                f"got {tuple(x.shape)}"
            )
        for block in self.convs:
            x = block(x)
        return self.linear(x.flatten(1))


def create_model(config: CnnConfig = CnnConfig(), seed: Optional[int] = None) -> AuraCnn:
    """Build a model; a seed makes the initial weights reproducible without touching global RNG state."""
    if seed is None:
        return AuraCnn(config)
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return AuraCnn(config)


def scores_from_logits(logits: torch.Tensor) -> torch.Tensor:
    return torch.softmax(logits, dim=-1)[:, POSITIVE_CLASS]


def cnn_forward(model: AuraCnn, windows, mode: str = 'infer') -> np.ndarray:
    """
    Positive-class scores for a batch of windows (or a single window).

    'infer' uses running batch-norm statistics and leaves the model
    untouched; 'train' uses batch statistics and updates the running ones.
    """
    if mode not in ('infer', 'train'):
        raise ValueError(f"mode must be 'infer' or 'train', got {mode}")
    param = next(model.parameters())
    x = torch.as_tensor(np.asarray(windows), dtype=param.dtype)
    single = x.dim() == 1 or (x.dim() == 2 and model.config.in_channels == 2)
    if single:
        x = x.unsqueeze(0)
    was_training = model.training
    model.train(mode == 'train')
    try:
        with torch.no_grad():
            scores = scores_from_logits(model(x))
    finally:
        model.train(was_training)
    out = scores.cpu().numpy().astype(float)
    return out[0] if single else out
