"""ROC analysis, TPR/TNR tables and the approach speed limit."""

import logging
from fractions import Fraction
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from .models import RocCurve

logger = logging.getLogger(__name__)

# Table rows and the scenarios they pool
STATIC_OBJECT_SCENARIOS = ('moving_robot_static_object',)
MOVING_OBJECT_SCENARIOS = ('static_robot_moving_object', 'moving_robot_moving_object')
TABLE_ROWS = ('Static Object TPR', 'Moving Object TPR', 'TNR')


def _check_binary(labels: np.ndarray):
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")


def compute_roc(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """
    Operating points for the rule "positive when score > threshold".

    Thresholds are +inf, every distinct score in decreasing order, then -inf,
    so the curve runs from (0, 0) to (1, 1). The best point maximizes
    TPR - FPR; ties go to the highest threshold.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError(f"scores and labels must be aligned 1-D arrays, got {scores.shape} and {labels.shape}")
    if np.isnan(scores).any():
        raise ValueError("scores contain NaN")
    _check_binary(labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError(f"ROC needs both classes, got {n_pos} positive and {n_neg} negative")

    distinct = np.unique(scores)[::-1]
    thresholds = np.concatenate(([np.inf], distinct, [-np.inf]))
    pos_sorted = np.sort(scores[labels == 1])
    neg_sorted = np.sort(scores[labels == 0])
    # Count of scores strictly above each threshold
    tp = n_pos - np.searchsorted(pos_sorted, thresholds, side='right')
    fp = n_neg - np.searchsorted(neg_sorted, thresholds, side='right')
    tpr = tp / n_pos
    fpr = fp / n_neg

    # Trapezoids along increasing FPR
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2))
    best = int(np.argmax(tpr - fpr))
    logger.debug(f"ROC over {len(scores)} trials: AUC {auc:.4f}, best threshold {thresholds[best]:.4f}")
    return RocCurve(thresholds=thresholds, tpr=tpr, fpr=fpr, area_under_curve=auc, best_index=best)


def detector_threshold(roc: RocCurve) -> float:
    """Best ROC threshold clipped into the detector's [0, 1] range."""
    return float(np.clip(roc.best_threshold, 0.0, 1.0))


def _rate(hits: int, total: int) -> Optional[Fraction]:
    return Fraction(hits, total) if total else None


def _as_float(value: Optional[Fraction]) -> float:
    return float(value) if value is not None else float('nan')


def rates(decisions: Sequence[bool], labels: Sequence[int]) -> Dict[str, object]:
    """Counts and exact TPR/TNR of one group; an empty class gives None."""
    decisions = np.asarray(decisions, dtype=bool)
    labels = np.asarray(labels, dtype=int)
    if decisions.shape != labels.shape:
        raise ValueError(f"decisions and labels are not aligned: {decisions.shape} vs {labels.shape}")
    _check_binary(labels)
    tp = int(np.sum(decisions & (labels == 1)))
    fn = int(np.sum(~decisions & (labels == 1)))
    tn = int(np.sum(~decisions & (labels == 0)))
    fp = int(np.sum(decisions & (labels == 0)))
    return {
        'tp': tp,
        'fn': fn,
        'tn': tn,
        'fp': fp,
        'tpr': _rate(tp, tp + fn),
        'tnr': _rate(tn, tn + fp),
    }


def tpr_tnr(
    decisions: Sequence[bool],
    labels: Sequence[int],
    groups: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """
    Overall and per-group TPR/TNR.

    The first row is 'all'; group rows follow in first-seen order. Rates are
    floats computed from exact fractions; undefined rates are NaN.
    """
    labels = np.asarray(labels, dtype=int)
    decisions = np.asarray(decisions, dtype=bool)
    rows = [('all', rates(decisions, labels))]
    if groups is not None:
        groups = np.asarray(groups, dtype=object)
        if len(groups) != len(labels):
            raise ValueError(f"groups and labels are not aligned: {len(groups)} vs {len(labels)}")
        for name in dict.fromkeys(groups):
            mask = groups == name
            rows.append((name, rates(decisions[mask], labels[mask])))
    frame = pd.DataFrame([
        {
            'group': name,
            'tp': r['tp'],
            'fn': r['fn'],
            'tn': r['tn'],
            'fp': r['fp'],
            'tpr': _as_float(r['tpr']),
            'tnr': _as_float(r['tnr']),
        }
        for name, r in rows
    ])
    for name, r in rows:
        if r['tpr'] is None and r['tnr'] is None:
            logger.warning(f"Group '{name}' has no trials")
    return frame


def table_one(decisions: Sequence[bool], labels: Sequence[int], scenarios: Sequence[str]) -> pd.DataFrame:
    """Static-object TPR, moving-object TPR and combined TNR as percentages."""
    decisions = np.asarray(decisions, dtype=bool)
    labels = np.asarray(labels, dtype=int)
    scenarios = np.asarray(scenarios, dtype=object)
    static = np.isin(scenarios, STATIC_OBJECT_SCENARIOS) & (labels == 1)
    moving = np.isin(scenarios, MOVING_OBJECT_SCENARIOS) & (labels == 1)
    negative = labels == 0

    values = [
        rates(decisions[static], labels[static])['tpr'],
        rates(decisions[moving], labels[moving])['tpr'],
        rates(decisions[negative], labels[negative])['tnr'],
    ]
    counts = [int(static.sum()), int(moving.sum()), int(negative.sum())]
    return pd.DataFrame({
        'metric': list(TABLE_ROWS),
        'percent': [round(100 * float(v), 1) if v is not None else float('nan') for v in values],
        'trials': counts,
    })


def max_speed(D_m: float, t_d_s: float) -> float:
    """Highest approach speed (m/s) the system can stop for: D / t_d."""
    if t_d_s <= 0:
        raise ValueError(f"response time must be positive, got {t_d_s}")
    if D_m < 0:
        raise ValueError(f"detection distance must be >= 0, got {D_m}")
    return D_m / t_d_s
