"""Tests for the model container and its metadata."""

import json
import struct

import numpy as np
import pytest
import torch

from scripts.classifiers import (
    AuraCnn,
    SvmModel,
    cnn_forward,
    create_model,
    decode_model,
    encode_model,
    load_model,
    metadata_path,
    predict_windows,
    save_model,
    svm_predict,
    svm_train,
)
from scripts.common import canonical_json_bytes


def _with_descriptor(payload: bytes, descriptor: dict) -> bytes:
    _, length = struct.unpack('<HI', payload[4:10])
    desc = canonical_json_bytes(descriptor)
    return payload[:4] + struct.pack('<HI', 1, len(desc)) + desc + payload[10 + length:]


@pytest.fixture
def trained_cnn(tiny_config):
    model = create_model(tiny_config, seed=0)
    # Move running statistics away from their defaults
    cnn_forward(model, np.random.default_rng(0).normal(1.0, 2.0, (8, 64)), mode='train')
    model.eval()
    return model


def test_cnn_round_trip(trained_cnn, tmp_path):
    path = save_model(trained_cnn, tmp_path / 'model.lswm', hyperparameters={'learning_rate': 1e-5},
                      training_seed=7, dataset_fingerprint='ab' * 32)
    loaded, metadata = load_model(path)
    assert isinstance(loaded, AuraCnn)
    for name, value in trained_cnn.state_dict().items():
        restored = loaded.state_dict()[name]
        assert restored.dtype == value.dtype
        assert torch.equal(restored, value)
    windows = np.random.default_rng(1).normal(size=(5, 64))
    assert np.array_equal(predict_windows(trained_cnn, windows), predict_windows(loaded, windows))
    assert metadata['training_seed'] == 7
    assert metadata['kind'] == 'cnn'
    assert metadata['descriptor']['config']['layers'] == 2


def test_encoding_is_deterministic(trained_cnn):
    assert encode_model(trained_cnn) == encode_model(trained_cnn)


def test_svm_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    x = np.vstack([rng.normal(1, 0.5, (20, 8)), rng.normal(-1, 0.5, (20, 8))])
    model = svm_train(x, np.r_[np.ones(20), np.zeros(20)])
    loaded, metadata = load_model(save_model(model, tmp_path / 'svm.lswm'))
    assert isinstance(loaded, SvmModel)
    assert loaded.n_support == model.n_support
    assert metadata['descriptor']['n_features'] == 8
    assert np.allclose(svm_predict(loaded, x), svm_predict(model, x), atol=1e-5)


def test_bad_magic(trained_cnn):
    payload = encode_model(trained_cnn)
    with pytest.raises(ValueError, match="magic"):
        decode_model(b'XXXX' + payload[4:])


def test_unknown_version(trained_cnn):
    payload = bytearray(encode_model(trained_cnn))
    payload[4:6] = struct.pack('<H', 99)
    with pytest.raises(ValueError, match="version"):
        decode_model(bytes(payload))


def test_truncated_file(trained_cnn):
    with pytest.raises(ValueError, match="truncated"):
        decode_model(encode_model(trained_cnn)[:-10])


def test_descriptor_tensor_mismatch(trained_cnn):
    payload = encode_model(trained_cnn)
    descriptor = {'kind': 'cnn', 'config': dict(trained_cnn.config.descriptor(), channels=4)}
    with pytest.raises(ValueError):
        decode_model(_with_descriptor(payload, descriptor))


def test_unknown_kind(trained_cnn):
    with pytest.raises(ValueError, match="kind"):
        decode_model(_with_descriptor(encode_model(trained_cnn), {'kind': 'forest'}))


def test_invalid_metadata_rejected(trained_cnn, tmp_path):
    path = save_model(trained_cnn, tmp_path / 'model.lswm')
    meta = json.loads(metadata_path(path).read_text())
    del meta['model_sha256']
    metadata_path(path).write_text(json.dumps(meta))
    with pytest.raises(ValueError, match="metadata"):
        load_model(path)


def test_missing_metadata_still_loads(trained_cnn, tmp_path):
    path = save_model(trained_cnn, tmp_path / 'model.lswm')
    metadata_path(path).unlink()
    model, metadata = load_model(path)
    assert metadata == {}
    assert isinstance(model, AuraCnn)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / 'absent.lswm')
