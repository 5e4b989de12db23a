"""Atomic file writes and SHA-256 fingerprints."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)


def canonical_json_bytes(data: Any) -> bytes:
    """Sorted keys, no whitespace: identical documents give identical bytes."""
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False).encode('utf-8')


def fingerprint(data: Any) -> str:
    """SHA-256 of the canonical JSON encoding."""
    return hashlib.sha256(canonical_json_bytes(data)).hexdigest()


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            digest.update(chunk)
    return digest.hexdigest()


def atomic_write_bytes(path: Path, payload: bytes) -> Path:
    """Write to <path>.tmp, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + '.tmp')
    with open(temp_path, 'wb') as f:
        f.write(payload)
    temp_path.replace(path)
    return path


def atomic_write_text(path: Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode('utf-8'))


def atomic_write_json(path: Path, data: Any, indent: int = 2) -> Path:
    text = json.dumps(data, indent=indent, sort_keys=True, ensure_ascii=False) + '\n'
    return atomic_write_text(path, text)
