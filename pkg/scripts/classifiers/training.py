"""
Seeded CNN training on randomly drawn windows.

Every step draws 16 positive and 16 negative windows uniformly among all
contiguous windows of the labeled sequences, takes one Adam step on the
mean softmax cross-entropy and, every eval_every steps, scores a fixed
validation set for early stopping.
"""

import copy
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import torch
import torch.nn.functional as F
from tqdm import tqdm

from scripts.common import atomic_write_text

from .cnn import AuraCnn, CnnConfig, create_model
from .constants import (
    ADAM_BETAS,
    ADAM_EPS,
    EVAL_EVERY,
    LEARNING_RATE,
    MAX_STEPS,
    NEGATIVES_PER_BATCH,
    PATIENCE,
    POSITIVES_PER_BATCH,
    VALIDATION_FRACTION,
    VALIDATION_WINDOWS,
    WINDOW_LENGTH,
)
from .errors import TrainingError

logger = logging.getLogger(__name__)

LOSS_TRACE_COLUMNS = ['step', 'loss', 'val_loss', 'val_accuracy']


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = LEARNING_RATE
    betas: Tuple[float, float] = ADAM_BETAS
    eps: float = ADAM_EPS
    positives_per_batch: int = POSITIVES_PER_BATCH
    negatives_per_batch: int = NEGATIVES_PER_BATCH
    max_steps: int = MAX_STEPS
    eval_every: int = EVAL_EVERY
    patience: int = PATIENCE
    validation_fraction: float = VALIDATION_FRACTION

    def __post_init__(self):
        if self.learning_rate <= 0 or self.max_steps < 1 or self.eval_every < 1:
            raise ValueError("learning_rate, max_steps and eval_every must be positive")
        if self.positives_per_batch < 1 or self.negatives_per_batch < 1:
            raise ValueError("each batch needs at least one window per class")
        if not 0 <= self.validation_fraction < 1:
            raise ValueError(f"validation_fraction must be in [0, 1), got {self.validation_fraction}")

    def as_dict(self) -> dict:
        data = asdict(self)
        data['betas'] = list(self.betas)
        return data


class WindowSource:
    """
    Labeled sequences from which contiguous windows are drawn.

    Sequences are 1-D (n,) or channel-first (channels, n). A sequence
    shorter than the window contributes nothing.
    """

    def __init__(
        self,
        positives: Sequence[np.ndarray],
        negatives: Sequence[np.ndarray],
        window_length: int = WINDOW_LENGTH,
    ):
        self.window_length = window_length
        self.sequences = {
            1: [np.atleast_2d(np.asarray(s, dtype=float)) for s in positives],
            0: [np.atleast_2d(np.asarray(s, dtype=float)) for s in negatives],
        }
        channels = {s.shape[0] for seqs in self.sequences.values() for s in seqs}
        if len(channels) > 1:
            raise ValueError(f"sequences disagree on channel count: {sorted(channels)}")
        self.channels = channels.pop() if channels else 1
        self._offsets = {label: self._window_counts(seqs) for label, seqs in self.sequences.items()}

    def _window_counts(self, seqs) -> np.ndarray:
        counts = np.array([max(0, s.shape[1] - self.window_length + 1) for s in seqs], dtype=np.int64)
        return np.concatenate(([0], np.cumsum(counts)))

    def n_windows(self, label: int) -> int:
        return int(self._offsets[label][-1])

    def _shape(self, windows: np.ndarray) -> np.ndarray:
        return windows[:, 0, :] if self.channels == 1 else windows

    def sample(self, rng: np.random.Generator, label: int, count: int) -> np.ndarray:
        """count windows drawn uniformly among all valid start offsets of one class."""
        total = self.n_windows(label)
        if total == 0:
            raise TrainingError(f"no {'positive' if label else 'negative'} window of {self.window_length} samples")
        picks = rng.integers(0, total, size=count)
        seq_idx = np.searchsorted(self._offsets[label], picks, side='right') - 1
        starts = picks - self._offsets[label][seq_idx]
        out = np.empty((count, self.channels, self.window_length))
        for k, (s, start) in enumerate(zip(seq_idx, starts)):
            out[k] = self.sequences[label][s][:, start:start + self.window_length]
        return self._shape(out)

    def sample_batch(self, rng: np.random.Generator, positives: int, negatives: int) -> Tuple[np.ndarray, np.ndarray]:
        x = np.concatenate([self.sample(rng, 1, positives), self.sample(rng, 0, negatives)])
        y = np.r_[np.ones(positives, dtype=np.int64), np.zeros(negatives, dtype=np.int64)]
        return x, y

    def all_windows(self, step: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Tiled windows of both classes, `step` samples apart (default: non-overlapping)."""
        step = step or self.window_length
        xs, ys = [], []
        for label in (1, 0):
            for seq in self.sequences[label]:
                for start in range(0, seq.shape[1] - self.window_length + 1, step):
                    xs.append(seq[:, start:start + self.window_length])
                    ys.append(label)
        if not xs:
            return np.zeros((0, self.window_length)), np.zeros(0, dtype=np.int64)
        return self._shape(np.stack(xs)), np.array(ys, dtype=np.int64)

    def split(self, fraction: float) -> Tuple['WindowSource', 'WindowSource']:
        """Hold out the last `fraction` of every sequence."""
        train, held = {1: [], 0: []}, {1: [], 0: []}
        for label, seqs in self.sequences.items():
            for seq in seqs:
                cut = int(round(seq.shape[1] * (1 - fraction)))
                train[label].append(seq[:, :cut])
                held[label].append(seq[:, cut:])
        return (
            WindowSource(train[1], train[0], self.window_length),
            WindowSource(held[1], held[0], self.window_length),
        )


@dataclass
class TrainResult:
    model: AuraCnn
    trace: pd.DataFrame
    best_step: int
    steps_run: int


def _to_tensor(x: np.ndarray, model: AuraCnn) -> torch.Tensor:
    return torch.as_tensor(x, dtype=next(model.parameters()).dtype)


def cnn_gradients(model: AuraCnn, x, y) -> Tuple[float, Dict[str, torch.Tensor]]:
    """
    Mean cross-entropy of a labeled batch and its gradient for every parameter.

    Uses the model's current mode (batch statistics in train mode).
    """
    model.zero_grad(set_to_none=True)
    logits = model(_to_tensor(np.asarray(x), model))
    loss = F.cross_entropy(logits, torch.as_tensor(np.asarray(y), dtype=torch.long))
    loss.backward()
    grads = {
        name: (p.grad.detach().clone() if p.grad is not None else torch.zeros_like(p))
        for name, p in model.named_parameters()
    }
    return float(loss.item()), grads


def evaluate(model: AuraCnn, x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """Mean loss and accuracy in inference mode; leaves the model's mode as it was."""
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            logits = model(_to_tensor(x, model))
            target = torch.as_tensor(y, dtype=torch.long)
            loss = float(F.cross_entropy(logits, target).item())
            accuracy = float((logits.argmax(dim=1) == target).double().mean().item())
    finally:
        model.train(was_training)
    return loss, accuracy


def _validation_set(source: WindowSource, rng: np.random.Generator, limit: int = VALIDATION_WINDOWS):
    x, y = source.all_windows()
    if len(y) > limit:
        keep = np.sort(rng.choice(len(y), size=limit, replace=False))
        x, y = x[keep], y[keep]
    return x, y


def cnn_train(
    source: WindowSource,
    config: CnnConfig = CnnConfig(),
    hyper: TrainConfig = TrainConfig(),
    seed: int = 0,
    progress: bool = True,
) -> TrainResult:
    """
    Train a fresh model from the seed.

    With a validation fraction, the last part of every sequence is held
    out, the model is scored every eval_every steps, training stops after
    `patience` evaluations without improvement and the best weights are
    restored.
    """
    if source.n_windows(1) == 0 or source.n_windows(0) == 0:
        raise TrainingError("training needs at least one positive and one negative window")
    if source.window_length != config.window_length:
        raise ValueError(f"source windows are {source.window_length} samples, model expects {config.window_length}")

    batch_seq, init_seq, val_seq = np.random.SeedSequence(seed).spawn(3)
    batch_rng = np.random.default_rng(batch_seq)

    train_source, val_source = source, None
    if hyper.validation_fraction > 0:
        train_source, val_source = source.split(hyper.validation_fraction)
        if min(val_source.n_windows(1), val_source.n_windows(0)) == 0 or \
                min(train_source.n_windows(1), train_source.n_windows(0)) == 0:
            logger.warning("Sequences too short to hold out a validation split; training without early stopping")
            train_source, val_source = source, None
    val_x, val_y = (None, None)
    if val_source is not None:
        val_x, val_y = _validation_set(val_source, np.random.default_rng(val_seq))

    model = create_model(config, seed=int(init_seq.generate_state(1)[0]))
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=hyper.learning_rate, betas=hyper.betas, eps=hyper.eps)

    history: List[Dict] = []
    best_loss = math.inf
    best_state = None
    best_step = 0
    stale = 0
    last_finite = None
    step = 0

    logger.info(
        f"Training CNN: {train_source.n_windows(1)} positive / {train_source.n_windows(0)} negative windows, "
        f"up to {hyper.max_steps} steps"
    )
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        with tqdm(range(1, hyper.max_steps + 1), desc="Training", disable=not progress) as pbar:
            for step in pbar:
                x, y = train_source.sample_batch(batch_rng, hyper.positives_per_batch, hyper.negatives_per_batch)
                optimizer.zero_grad(set_to_none=True)
                logits = model(_to_tensor(x, model))
                loss = F.cross_entropy(logits, torch.as_tensor(y))
                if not torch.isfinite(loss):
                    raise TrainingError(f"loss diverged at step {step}; last finite loss {last_finite}")
                loss.backward()
                optimizer.step()
                last_finite = float(loss.item())

                row = {'step': step, 'loss': last_finite, 'val_loss': np.nan, 'val_accuracy': np.nan}
                if val_x is not None and step % hyper.eval_every == 0:
                    val_loss, val_acc = evaluate(model, val_x, val_y)
                    row.update(val_loss=val_loss, val_accuracy=val_acc)
                    pbar.set_postfix({'loss': f'{last_finite:.4f}', 'val': f'{val_loss:.4f}'})
                    if val_loss < best_loss:
                        best_loss, best_step, stale = val_loss, step, 0
                        best_state = copy.deepcopy(model.state_dict())
                    else:
                        stale += 1
                    if hyper.patience > 0 and stale >= hyper.patience:
                        history.append(row)
                        logger.info(f"Early stopping at step {step}; best validation loss {best_loss:.4f} at step {best_step}")
                        break
                history.append(row)

    if best_state is not None:
        model.load_state_dict(best_state)
    else:
        best_step = step
    model.eval()
    trace = pd.DataFrame(history, columns=LOSS_TRACE_COLUMNS)
    return TrainResult(model=model, trace=trace, best_step=best_step, steps_run=step)


def save_loss_trace(trace: pd.DataFrame, path: Path) -> Path:
    atomic_write_text(Path(path), trace.to_csv(index=False))
    return Path(path)
