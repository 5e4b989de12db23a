"""
Model files.

Binary container (little-endian):

    b"LSWM" | uint16 version | uint32 descriptor length | descriptor JSON
    | uint32 tensor count | per tensor: uint16 name length, name,
      uint8 ndim, uint32 dims..., float32 data

The descriptor holds the model kind and its architecture. A sibling
`<path>.json` carries metadata (hyperparameters, seed, dataset
fingerprint, container digest).
"""

import io
import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import torch

from scripts.common import atomic_write_bytes, atomic_write_json, canonical_json_bytes, sha256_file, validate_schema

from .cnn import AuraCnn, CnnConfig
from .constants import METADATA_SUFFIX, MODEL_FORMAT_VERSION, MODEL_MAGIC
from .models import SvmModel

logger = logging.getLogger(__name__)

Model = Union[AuraCnn, SvmModel]

METADATA_SCHEMA = {
    "type": "object",
    "required": ["format_version", "kind", "descriptor", "hyperparameters", "training_seed",
                 "dataset_fingerprint", "model_sha256"],
    "properties": {
        "format_version": {"type": "integer", "minimum": 1},
        "kind": {"type": "string", "enum": ["cnn", "svm"]},
        "descriptor": {"type": "object"},
        "hyperparameters": {"type": "object"},
        "training_seed": {"type": ["integer", "null"]},
        "dataset_fingerprint": {"type": ["string", "null"]},
        "model_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "metrics": {"type": "object"},
    },
}

SVM_TENSORS = ('support_vectors', 'dual_coefficients', 'labels', 'bias', 'feature_mean', 'feature_scale')


def metadata_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + METADATA_SUFFIX)


def _descriptor_and_tensors(model: Model) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    if isinstance(model, AuraCnn):
        tensors = {
            name: value.detach().cpu().numpy().astype(np.float32)
            for name, value in model.state_dict().items()
        }
        return {"kind": "cnn", "config": model.config.descriptor()}, tensors
    if isinstance(model, SvmModel):
        descriptor = {
            "kind": "svm",
            "rbf_gamma": model.rbf_gamma,
            "regularization_C": model.regularization_C,
            "n_features": model.n_features,
            "n_support": model.n_support,
        }
        tensors = {
            'support_vectors': model.support_vectors,
            'dual_coefficients': model.dual_coefficients,
            'labels': model.labels,
            'bias': np.array([model.bias]),
            'feature_mean': model.feature_mean,
            'feature_scale': model.feature_scale,
        }
        return descriptor, {k: np.asarray(v, dtype=np.float32) for k, v in tensors.items()}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def encode_model(model: Model) -> bytes:
    descriptor, tensors = _descriptor_and_tensors(model)
    buf = io.BytesIO()
    desc = canonical_json_bytes(descriptor)
    buf.write(MODEL_MAGIC)
    buf.write(struct.pack('<HI', MODEL_FORMAT_VERSION, len(desc)))
    buf.write(desc)
    buf.write(struct.pack('<I', len(tensors)))
    for name, array in tensors.items():
        encoded = name.encode('utf-8')
        buf.write(struct.pack('<H', len(encoded)))
        buf.write(encoded)
        buf.write(struct.pack('<B', array.ndim))
        buf.write(struct.pack(f'<{array.ndim}I', *array.shape))
        buf.write(array.astype('<f4').tobytes())
    return buf.getvalue()


class _Reader:
    def __init__(self, payload: bytes):
        self.payload = payload
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.payload):
            raise ValueError("model file truncated")
        chunk = self.payload[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_model(payload: bytes) -> Tuple[Model, Dict[str, Any]]:
    """Rebuild a model from container bytes; returns the model and its descriptor."""
    reader = _Reader(payload)
    magic = reader.take(4)
    if magic != MODEL_MAGIC:
        raise ValueError(f"not a model file: magic {magic!r}")
    version, desc_len = reader.unpack('<HI')
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version}, expected {MODEL_FORMAT_VERSION}")
    try:
        descriptor = json.loads(reader.take(desc_len).decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ValueError(f"corrupt architecture descriptor: {e}") from e
    (count,) = reader.unpack('<I')
    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = reader.unpack('<H')
        name = reader.take(name_len).decode('utf-8')
        (ndim,) = reader.unpack('<B')
        shape = reader.unpack(f'<{ndim}I') if ndim else ()
        size = int(np.prod(shape)) if shape else 1
        tensors[name] = np.frombuffer(reader.take(4 * size), dtype='<f4').reshape(shape)
    if reader.pos != len(payload):
        raise ValueError(f"{len(payload) - reader.pos} trailing bytes after model tensors")

    kind = descriptor.get('kind')
    if kind == 'cnn':
        return _build_cnn(descriptor, tensors), descriptor
    if kind == 'svm':
        return _build_svm(descriptor, tensors), descriptor
    raise ValueError(f"unknown model kind {kind!r}")


def _build_cnn(descriptor: Dict[str, Any], tensors: Dict[str, np.ndarray]) -> AuraCnn:
    config = CnnConfig.from_descriptor(descriptor.get('config', {}))
    model = AuraCnn(config)
    expected = model.state_dict()
    if set(expected) != set(tensors):
        raise ValueError(
            f"architecture mismatch: missing {sorted(set(expected) - set(tensors))}, "
            f"unexpected {sorted(set(tensors) - set(expected))}"
        )
    state = {}
    for name, reference in expected.items():
        array = tensors[name]
        if tuple(array.shape) != tuple(reference.shape):
            raise ValueError(f"tensor {name} has shape {array.shape}, architecture needs {tuple(reference.shape)}")
        state[name] = torch.from_numpy(array.copy()).to(reference.dtype)
    model.load_state_dict(state)
    model.eval()
    return model


def _build_svm(descriptor: Dict[str, Any], tensors: Dict[str, np.ndarray]) -> SvmModel:
    missing = [name for name in SVM_TENSORS if name not in tensors]
    if missing:
        raise ValueError(f"SVM file lacks tensors {missing}")
    model = SvmModel(
        support_vectors=tensors['support_vectors'].astype(float),
        dual_coefficients=tensors['dual_coefficients'].astype(float),
        labels=tensors['labels'].astype(float),
        bias=float(tensors['bias'][0]),
        rbf_gamma=float(descriptor['rbf_gamma']),
        regularization_C=float(descriptor['regularization_C']),
        feature_mean=tensors['feature_mean'].astype(float),
        feature_scale=tensors['feature_scale'].astype(float),
    )
    if model.n_features != descriptor.get('n_features') or model.n_support != descriptor.get('n_support'):
        raise ValueError("SVM tensors disagree with the descriptor")
    return model


def save_model(
    model: Model,
    path: Path,
    hyperparameters: Optional[Dict[str, Any]] = None,
    training_seed: Optional[int] = None,
    dataset_fingerprint: Optional[str] = None,
    metrics: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write the container and its metadata file."""
    path = Path(path)
    payload = encode_model(model)
    atomic_write_bytes(path, payload)
    descriptor, _ = _descriptor_and_tensors(model)
    metadata = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": descriptor["kind"],
        "descriptor": descriptor,
        "hyperparameters": hyperparameters or {},
        "training_seed": training_seed,
        "dataset_fingerprint": dataset_fingerprint,
        "model_sha256": sha256_file(path),
    }
    if metrics:
        metadata["metrics"] = metrics
    atomic_write_json(metadata_path(path), metadata)
    logger.info(f"Saved {descriptor['kind']} model to {path}")
    return path


def load_model(path: Path) -> Tuple[Model, Dict[str, Any]]:
    """Read a model and its metadata (empty dict when the metadata file is absent)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"model file not found: {path}")
    model, descriptor = decode_model(path.read_bytes())
    meta_file = metadata_path(path)
    if not meta_file.exists():
        logger.warning(f"No metadata next to {path}")
        return model, {}
    metadata = json.loads(meta_file.read_text(encoding='utf-8'))
    valid, error = validate_schema(metadata, METADATA_SCHEMA)
    if not valid:
        raise ValueError(f"invalid model metadata {meta_file}: {error}")
    if metadata["descriptor"] != descriptor:
        raise ValueError(f"metadata descriptor does not match {path}")
    if metadata["model_sha256"] != sha256_file(path):
        logger.warning(f"Fingerprint mismatch for {path}: metadata was written for different bytes")
    return model, metadata
