"""Shared persistence, validation and logging helpers."""

from .io_utils import (
    atomic_write_bytes,
    atomic_write_json,
    atomic_write_text,
    canonical_json_bytes,
    fingerprint,
    sha256_file,
)
from .logger import StageLogger, log_summary, setup_logging
from .validation import validate_schema

__all__ = [
    'atomic_write_bytes',
    'atomic_write_json',
    'atomic_write_text',
    'canonical_json_bytes',
    'fingerprint',
    'sha256_file',
    'StageLogger',
    'log_summary',
    'setup_logging',
    'validate_schema',
]
