"""Train/test splits of a field dataset."""

import logging
from typing import Dict, List, Tuple

import pandas as pd

from .metrics import tpr_tnr
from .models import FieldDataset

logger = logging.getLogger(__name__)


def _alternate(ids: List[int], reverse: bool) -> Tuple[List[int], List[int]]:
    first, second = ids[0::2], ids[1::2]
    return (second, first) if reverse else (first, second)


def split_by_object(dataset: FieldDataset, reverse: bool = False) -> Tuple[List[int], List[int]]:
    """
    Half the object profiles train, the other half test.

    Objects are halved in first-seen order; negatives alternate between the
    two sides. reverse=True swaps the halves.
    """
    objects = list(dict.fromkeys(t['object'] for t in dataset.trials if t['label'] == 1))
    if len(objects) < 2:
        raise ValueError(f"an object split needs at least 2 objects, got {len(objects)}")
    cut = (len(objects) + 1) // 2
    train_objects, test_objects = set(objects[:cut]), set(objects[cut:])
    if reverse:
        train_objects, test_objects = test_objects, train_objects

    neg_train, neg_test = _alternate(dataset.ids(label=0), reverse)
    train = [t['id'] for t in dataset.trials if t['label'] == 1 and t['object'] in train_objects]
    test = [t['id'] for t in dataset.trials if t['label'] == 1 and t['object'] in test_objects]
    logger.info(f"Object split: {len(train_objects)} train / {len(test_objects)} test objects")
    return sorted(train + neg_train), sorted(test + neg_test)


def split_by_day(dataset: FieldDataset, reverse: bool = False) -> Tuple[List[int], List[int]]:
    """The first recording day trains, the second tests (swapped with reverse=True)."""
    days = sorted({t['day'] for t in dataset.trials})
    if len(days) < 2:
        raise ValueError(f"a day split needs two recording days, got {days}")
    train_day, test_day = (days[1], days[0]) if reverse else (days[0], days[1])
    train = [t['id'] for t in dataset.trials if t['day'] == train_day]
    test = [t['id'] for t in dataset.trials if t['day'] == test_day]
    return train, test


def check_disjoint(train: List[int], test: List[int]):
    overlap = set(train) & set(test)
    if overlap:
        raise ValueError(f"{len(overlap)} trial(s) appear in both train and test")


def per_object_tpr(dataset: FieldDataset, decisions: Dict[int, bool]) -> pd.DataFrame:
    """One row per object profile over the positive trials that have a decision."""
    trials = [t for t in dataset.trials if t['label'] == 1 and t['id'] in decisions]
    if not trials:
        return pd.DataFrame(columns=['object', 'trials', 'detected', 'tpr'])
    frame = tpr_tnr(
        [decisions[t['id']] for t in trials],
        [1] * len(trials),
        [t['object'] for t in trials],
    ).iloc[1:]
    return pd.DataFrame({
        'object': frame['group'].values,
        'trials': (frame['tp'] + frame['fn']).values,
        'detected': frame['tp'].values,
        'tpr': frame['tpr'].values,
    })
