"""CSV export of envelopes and CUSUM traces."""

import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from scripts.common import atomic_write_text
from scripts.lsw_sim.models import SampleBuffer

from .monitor import MonitorResult

logger = logging.getLogger(__name__)


def envelope_frame(buffer: SampleBuffer) -> pd.DataFrame:
    return pd.DataFrame({
        'index': np.arange(len(buffer)),
        'time_s': buffer.times(),
        'value': buffer.samples,
    })


def cusum_frame(result: MonitorResult) -> pd.DataFrame:
    return pd.DataFrame({
        'index': np.arange(len(result.block_values)),
        'time_s': result.block_times_s,
        'value': result.block_values,
        'alarm': result.alarm_mask.astype(int),
    })


def export_envelope_csv(buffer: SampleBuffer, path: Path, decimate: Optional[int] = None) -> Path:
    """Write index,time_s,value; decimate keeps every n-th sample."""
    frame = envelope_frame(buffer)
    if decimate and decimate > 1:
        frame = frame.iloc[::decimate]
    atomic_write_text(Path(path), frame.to_csv(index=False))
    logger.debug(f"Wrote {len(frame)} envelope rows to {path}")
    return Path(path)


def export_cusum_csv(result: MonitorResult, path: Path) -> Path:
    """Write index,time_s,value,alarm at block rate."""
    frame = cusum_frame(result)
    atomic_write_text(Path(path), frame.to_csv(index=False))
    logger.debug(f"Wrote {len(frame)} CUSUM rows to {path}")
    return Path(path)
