"""Read and write SampleBuffers as float32 WAV or raw float32 with a JSON sidecar."""

import json
import logging
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from scripts.common.io_utils import atomic_write_bytes, atomic_write_json

from .constants import RAW_SUFFIX, WAV_SUFFIX
from .models import SampleBuffer

logger = logging.getLogger(__name__)


def sidecar_path(path: Path) -> Path:
    return Path(path).with_suffix('.json')


def write_wav(buffer: SampleBuffer, path: Path) -> Path:
    """Mono 32-bit float PCM at the buffer's sample rate."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + '.tmp')
    wavfile.write(tmp, int(round(buffer.sample_rate_hz)), buffer.samples.astype(np.float32))
    tmp.replace(path)
    return path


def read_wav(path: Path) -> SampleBuffer:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Audio file not found: {path}")
    rate, data = wavfile.read(path)
    if data.ndim != 1:
        raise ValueError(f"{path} has {data.shape[1]} channels, expected mono")
    if np.issubdtype(data.dtype, np.integer):
        data = data.astype(np.float64) / np.iinfo(data.dtype).max
    return SampleBuffer(data.astype(np.float64), float(rate), 0.0)


def write_raw(buffer: SampleBuffer, path: Path) -> Path:
    """Little-endian float32 samples plus {sample_rate_hz, start_time_s} sidecar."""
    path = Path(path)
    atomic_write_bytes(path, buffer.samples.astype('<f4').tobytes())
    atomic_write_json(
        sidecar_path(path),
        {'sample_rate_hz': buffer.sample_rate_hz, 'start_time_s': buffer.start_time_s},
    )
    return path


def read_raw(path: Path) -> SampleBuffer:
    path = Path(path)
    meta_path = sidecar_path(path)
    if not path.exists():
        raise FileNotFoundError(f"Raw sample file not found: {path}")
    if not meta_path.exists():
        raise FileNotFoundError(f"Sidecar not found: {meta_path}")
    with open(meta_path, 'r', encoding='utf-8') as f:
        meta = json.load(f)
    samples = np.frombuffer(path.read_bytes(), dtype='<f4').astype(np.float64)
    return SampleBuffer(samples, float(meta['sample_rate_hz']), float(meta.get('start_time_s', 0.0)))


def write_buffer(buffer: SampleBuffer, path: Path) -> Path:
    if Path(path).suffix == WAV_SUFFIX:
        return write_wav(buffer, path)
    return write_raw(buffer, path)


def read_buffer(path: Path) -> SampleBuffer:
    """Dispatch on suffix: .wav or raw float32."""
    path = Path(path)
    if path.suffix == WAV_SUFFIX:
        return read_wav(path)
    if path.suffix != RAW_SUFFIX:
        logger.warning(f"Unrecognised suffix {path.suffix}, reading as raw float32")
    return read_raw(path)
