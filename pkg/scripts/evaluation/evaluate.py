"""
Training and scoring on field-dataset trials.

A trial is scored the way the detector sees it: its 0.3 s segment is
z-scored as one window, cut into N windows of 960 samples, each window is
classified and the trial score is the detector's mean over the N scores.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from scripts.classifiers import (
    AuraCnn,
    CnnConfig,
    TrainConfig,
    WindowSource,
    cnn_train,
    predict_windows,
    svm_train,
    windows_features,
)
from scripts.classifiers.constants import SVM_MAX_TRAIN
from scripts.detector import DetectorConfig, detect_window
from scripts.dsp import normalize_windows
from scripts.lsw_sim import SampleBuffer

from .dataset import labeled_segments
from .metrics import compute_roc, detector_threshold, table_one, tpr_tnr
from .models import FieldDataset, RocCurve

logger = logging.getLogger(__name__)


def normalized_segment(segment: np.ndarray, sample_rate_hz: float) -> np.ndarray:
    """Z-score a whole 0.3 s segment as one normalization window."""
    buffer = SampleBuffer(np.asarray(segment, dtype=float), sample_rate_hz)
    return normalize_windows(buffer, window_s=len(segment) / sample_rate_hz).samples


def segment_windows(segment: np.ndarray, window_samples: int) -> np.ndarray:
    """(count, window_samples) non-overlapping windows; a partial tail is dropped."""
    count = len(segment) // window_samples
    return np.asarray(segment[:count * window_samples]).reshape(count, window_samples)


def window_source(dataset: FieldDataset, ids: Optional[Sequence[int]] = None) -> WindowSource:
    rate = dataset.manifest['sample_rate_hz']
    positives, negatives = labeled_segments(dataset, ids)
    return WindowSource(
        [normalized_segment(s, rate) for s in positives],
        [normalized_segment(s, rate) for s in negatives],
    )


def train_classifier(
    dataset: FieldDataset,
    ids: Sequence[int],
    classifier: str = 'cnn',
    seed: int = 0,
    cnn_config: CnnConfig = CnnConfig(),
    train_config: TrainConfig = TrainConfig(),
    progress: bool = True,
):
    """
    Train either classifier on the windows of the given trials.

    Returns (model, loss trace or None). The SVM sees every tiled window up
    to SVM_MAX_TRAIN, subsampled with the seed when there are more.
    """
    source = window_source(dataset, ids)
    if classifier == 'cnn':
        result = cnn_train(source, cnn_config, train_config, seed=seed, progress=progress)
        return result.model, result.trace
    if classifier == 'svm':
        x, y = source.all_windows()
        if len(x) > SVM_MAX_TRAIN:
            keep = np.sort(np.random.default_rng(seed).choice(len(x), SVM_MAX_TRAIN, replace=False))
            x, y = x[keep], y[keep]
        logger.info(f"Training SVM on {len(x)} windows")
        features = windows_features(x, dataset.manifest['sample_rate_hz'])
        return svm_train(features, y, seed=seed, progress=progress), None
    raise ValueError(f"unknown classifier '{classifier}', expected 'cnn' or 'svm'")


def trial_scores(
    model,
    dataset: FieldDataset,
    ids: Optional[Sequence[int]] = None,
    cfg: DetectorConfig = DetectorConfig(),
    progress: bool = True,
) -> pd.DataFrame:
    """One row per trial: id, label, scenario, day, object, score."""
    if isinstance(model, AuraCnn) and model.config.in_channels != 1:
        raise ValueError("field segments hold envelopes; a two-channel model cannot score them")
    rate = dataset.manifest['sample_rate_hz']
    window_samples = int(round(cfg.window_duration_s * rate))
    chosen = set(dataset.ids() if ids is None else ids)
    trials = [t for t in dataset.trials if t['id'] in chosen]

    rows = []
    for trial in tqdm(trials, desc="Scoring", ncols=80, disable=not progress):
        windows = segment_windows(normalized_segment(dataset.segments[trial['id']], rate), window_samples)
        event = detect_window(predict_windows(model, windows, rate), cfg)
        rows.append({
            'id': trial['id'],
            'label': trial['label'],
            'scenario': trial['scenario'],
            'day': trial['day'],
            'object': trial.get('object'),
            'score': event.mean_score,
        })
    return pd.DataFrame(rows, columns=['id', 'label', 'scenario', 'day', 'object', 'score'])


@dataclass
class EvaluationResult:
    scores: pd.DataFrame
    roc: RocCurve
    threshold: float
    table: pd.DataFrame
    by_scenario: pd.DataFrame
    by_object: pd.DataFrame = field(default_factory=pd.DataFrame)

    @property
    def decisions(self) -> Dict[int, bool]:
        return dict(zip(self.scores['id'], self.scores['score'] > self.threshold))

    def summary_rows(self) -> List[tuple]:
        rows = [(m, f"{p:.1f}%" if not np.isnan(p) else "n/a") for m, p in zip(self.table['metric'], self.table['percent'])]
        rows.append(('AUC', f"{self.roc.area_under_curve:.4f}"))
        rows.append(('Threshold', f"{self.threshold:.4f}"))
        return rows


def evaluate_scores(scores: pd.DataFrame, threshold: Optional[float] = None) -> EvaluationResult:
    """
    ROC over trial scores and the metric tables at one threshold.

    Without a threshold the ROC-selected one is used.
    """
    roc = compute_roc(scores['score'].to_numpy(), scores['label'].to_numpy())
    if threshold is None:
        threshold = detector_threshold(roc)
    decisions = scores['score'].to_numpy() > threshold
    labels = scores['label'].to_numpy()
    positives = labels == 1
    by_object = tpr_tnr(decisions[positives], labels[positives], scores['object'].to_numpy()[positives])
    return EvaluationResult(
        scores=scores,
        roc=roc,
        threshold=threshold,
        table=table_one(decisions, labels, scores['scenario'].to_numpy()),
        by_scenario=tpr_tnr(decisions, labels, scores['scenario'].to_numpy()),
        by_object=by_object.iloc[1:].reset_index(drop=True),
    )


def evaluate_dataset(
    model,
    dataset: FieldDataset,
    ids: Optional[Sequence[int]] = None,
    cfg: DetectorConfig = DetectorConfig(),
    threshold: Optional[float] = None,
    progress: bool = True,
) -> EvaluationResult:
    scores = trial_scores(model, dataset, ids, cfg, progress)
    result = evaluate_scores(scores, threshold)
    logger.info(
        f"Evaluated {len(scores)} trials: AUC {result.roc.area_under_curve:.4f}, threshold {result.threshold:.4f}"
    )
    return result
