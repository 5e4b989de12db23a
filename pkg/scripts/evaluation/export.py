"""CSV, JSON-lines and gnuplot exports of evaluation results."""

import json
import logging
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from scripts.common import atomic_write_text

from .models import RocCurve

logger = logging.getLogger(__name__)


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    atomic_write_text(Path(path), frame.to_csv(index=False))
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return Path(path)


def write_roc_csv(roc: RocCurve, path: Path) -> Path:
    """threshold,tpr,fpr rows; the end points carry thresholds inf and -inf."""
    return write_csv(roc.to_frame(), path)


def write_jsonl(records: Iterable[dict], path: Path) -> Path:
    """One sorted-key JSON object per line."""
    lines = [json.dumps(_plain(r), sort_keys=True) for r in records]
    atomic_write_text(Path(path), "".join(line + "\n" for line in lines))
    return Path(path)


def _plain(record: dict) -> dict:
    out = {}
    for key, value in record.items():
        if isinstance(value, np.generic):
            value = value.item()
        if isinstance(value, float) and np.isnan(value):
            value = None
        out[key] = value
    return out


def write_gnuplot(frame: pd.DataFrame, path: Path, columns: Optional[list] = None, title: Optional[str] = None) -> Path:
    """
    Whitespace-separated data file with a '#' header line.

    String cells are quoted so gnuplot keeps them as one column.
    """
    columns = columns or list(frame.columns)
    lines = []
    if title:
        lines.append(f"# {title}")
    lines.append("# " + " ".join(columns))
    for row in frame[columns].itertuples(index=False):
        cells = []
        for value in row:
            if isinstance(value, str):
                cells.append(f'"{value}"')
            elif isinstance(value, (float, np.floating)):
                cells.append(repr(float(value)))
            else:
                cells.append(str(value))
        lines.append(" ".join(cells))
    atomic_write_text(Path(path), "\n".join(lines) + "\n")
    return Path(path)


def write_roc_gnuplot(roc: RocCurve, path: Path) -> Path:
    frame = roc.to_frame()[['fpr', 'tpr', 'threshold']]
    return write_gnuplot(frame, path, title=f"ROC, AUC {roc.area_under_curve:.4f}")
