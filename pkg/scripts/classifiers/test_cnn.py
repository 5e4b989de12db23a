"""Tests for the CNN, its gradients and training."""

import numpy as np
import pandas as pd
import pytest
import torch

from scripts.classifiers import (
    AuraCnn,
    CnnConfig,
    TrainConfig,
    TrainingError,
    WindowSource,
    cnn_forward,
    cnn_gradients,
    cnn_train,
    create_model,
    layer_lengths,
    save_loss_trace,
    scores_from_logits,
)


def _zero_weights(model):
    with torch.no_grad():
        for module in model.modules():
            if isinstance(module, (torch.nn.Conv1d, torch.nn.Linear)):
                module.weight.zero_()
                module.bias.zero_()


def test_default_shape_chain():
    config = CnnConfig()
    assert layer_lengths(config) == [960, 477, 236, 115, 55, 25, 10, 2]
    assert AuraCnn(config).flat_features == 512


def test_empty_layer_rejected():
    with pytest.raises(ValueError):
        CnnConfig(window_length=20, layers=4)


def test_wrong_window_length_rejected():
    model = create_model(seed=0)
    with pytest.raises(ValueError):
        cnn_forward(model, np.zeros(961))


def test_zero_model_scores_half():
    model = create_model(seed=0)
    _zero_weights(model)
    assert cnn_forward(model, np.random.default_rng(0).normal(size=960)) == 0.5


def test_scores_are_probabilities(tiny_config):
    model = create_model(tiny_config, seed=1)
    model.eval()
    x = torch.as_tensor(np.random.default_rng(1).normal(0, 5, (20, 64)), dtype=torch.float32)
    with torch.no_grad():
        probs = torch.softmax(model(x), dim=-1).double()
    assert torch.all((probs >= 0) & (probs <= 1))
    assert torch.allclose(probs.sum(dim=1), torch.ones(20, dtype=torch.float64), atol=1e-6)
    assert torch.allclose(scores_from_logits(model(x)).double(), probs[:, 1], atol=1e-7)


def test_inference_is_deterministic_and_batch_independent(tiny_config):
    model = create_model(tiny_config, seed=2)
    windows = np.random.default_rng(2).normal(size=(8, 64))
    alone = cnn_forward(model, windows[3])
    again = cnn_forward(create_model(tiny_config, seed=2), windows[3])
    batched = cnn_forward(model, windows)
    assert alone == again
    assert batched[3] == pytest.approx(alone, abs=1e-6)


def test_inference_leaves_model_untouched(tiny_config):
    model = create_model(tiny_config, seed=3)
    before = {k: v.clone() for k, v in model.state_dict().items()}
    cnn_forward(model, np.random.default_rng(3).normal(size=(4, 64)))
    for name, value in model.state_dict().items():
        assert torch.equal(value, before[name])


def test_train_mode_updates_running_statistics(tiny_config):
    model = create_model(tiny_config, seed=4)
    cnn_forward(model, np.random.default_rng(4).normal(3.0, 1.0, (4, 64)), mode='train')
    assert not torch.equal(model.convs[0][1].running_mean, torch.zeros(8))


def test_two_channel_variant():
    config = CnnConfig(window_length=64, layers=2, channels=8, in_channels=2)
    model = create_model(config, seed=5)
    scores = cnn_forward(model, np.random.default_rng(5).normal(size=(3, 2, 64)))
    assert scores.shape == (3,)


def _loss(model, x, y):
    with torch.no_grad():
        logits = model(torch.as_tensor(x))
        return float(torch.nn.functional.cross_entropy(logits, torch.as_tensor(y)).item())


def test_gradients_match_finite_differences(tiny_config):
    model = create_model(tiny_config, seed=6).double()
    model.train()
    rng = np.random.default_rng(6)
    x = rng.normal(size=(4, 64))
    y = np.array([1, 0, 1, 0])
    _, grads = cnn_gradients(model, x, y)

    eps = 1e-7
    params = dict(model.named_parameters())
    kinds = {'conv weight': [], 'conv bias': [], 'bn weight': [], 'bn bias': [], 'linear': []}
    for name in params:
        if name.startswith('linear'):
            kinds['linear'].append(name)
        elif name.endswith('0.weight'):
            kinds['conv weight'].append(name)
        elif name.endswith('0.bias'):
            kinds['conv bias'].append(name)
        elif name.endswith('1.weight'):
            kinds['bn weight'].append(name)
        else:
            kinds['bn bias'].append(name)

    for kind, names in kinds.items():
        candidates = [(n, i) for n in names for i in range(params[n].numel())]
        picks = rng.choice(len(candidates), size=min(100, len(candidates)), replace=False)
        for k in picks:
            name, idx = candidates[k]
            flat = params[name].data.view(-1)
            original = flat[idx].item()
            flat[idx] = original + eps
            up = _loss(model, x, y)
            flat[idx] = original - eps
            down = _loss(model, x, y)
            flat[idx] = original
            numeric = (up - down) / (2 * eps)
            analytic = grads[name].view(-1)[idx].item()
            assert abs(numeric - analytic) <= 1e-4 * max(abs(numeric), abs(analytic)) + 1e-7, (kind, name, idx)


def test_linear_gradients_opposite_at_symmetric_point(tiny_config):
    model = create_model(tiny_config, seed=7)
    _zero_weights(model)
    with torch.no_grad():
        for block in model.convs:
            block[1].bias.fill_(0.5)
    model.train()
    x = np.random.default_rng(7).normal(size=(4, 64))
    for y in (np.array([1, 1, 0, 0]), np.array([1, 1, 1, 0])):
        _, grads = cnn_gradients(model, x, y)
        w = grads['linear.weight']
        assert torch.allclose(w[0], -w[1], atol=1e-7)
    assert torch.any(w != 0)


def test_zero_input_zero_weights_gives_no_conv_gradient(tiny_config):
    model = create_model(tiny_config, seed=8)
    _zero_weights(model)
    model.train()
    _, grads = cnn_gradients(model, np.zeros((4, 64)), np.array([1, 0, 1, 0]))
    for name, grad in grads.items():
        if name.startswith('convs') and name.endswith('0.weight'):
            assert torch.count_nonzero(grad) == 0, name


def test_batches_are_balanced(toy_source):
    rng = np.random.default_rng(0)
    for _ in range(10):
        x, y = toy_source.sample_batch(rng, 16, 16)
        assert x.shape == (32, 64)
        assert int(y.sum()) == 16


def test_windows_are_contiguous_slices():
    source = WindowSource([np.arange(100.0), np.arange(1000.0, 1070.0)], [np.zeros(70)], window_length=64)
    assert source.n_windows(1) == 37 + 7
    windows = source.sample(np.random.default_rng(1), 1, 200)
    assert np.all(np.diff(windows, axis=1) == 1)


def test_empty_class_is_a_training_error(tiny_config):
    source = WindowSource([np.ones(200)], [np.ones(10)], window_length=64)
    with pytest.raises(TrainingError):
        cnn_train(source, tiny_config, TrainConfig(max_steps=5), progress=False)


def test_diverging_loss_aborts(tiny_config):
    bad = np.ones(200)
    bad[50:150] = np.nan
    source = WindowSource([bad], [np.zeros(200)], window_length=64)
    hyper = TrainConfig(max_steps=50, validation_fraction=0.0)
    with pytest.raises(TrainingError, match="diverged"):
        cnn_train(source, tiny_config, hyper, seed=0, progress=False)


def test_same_seed_same_parameters(tiny_config, toy_source):
    hyper = TrainConfig(learning_rate=1e-3, max_steps=15, validation_fraction=0.0)
    a = cnn_train(toy_source, tiny_config, hyper, seed=11, progress=False).model.state_dict()
    b = cnn_train(toy_source, tiny_config, hyper, seed=11, progress=False).model.state_dict()
    assert all(torch.equal(a[name], b[name]) for name in a)


def test_learns_separable_toy_set(tiny_config, toy_source, tmp_path):
    hyper = TrainConfig(learning_rate=1e-3, max_steps=300, eval_every=50, patience=100)
    result = cnn_train(toy_source, tiny_config, hyper, seed=0, progress=False)
    x, y = toy_source.all_windows(step=16)
    scores = cnn_forward(result.model, x)
    assert np.mean((scores > 0.5) == (y == 1)) >= 0.99

    losses = result.trace['loss'].to_numpy()
    assert losses[-20:].mean() < losses[:20].mean()

    frame = pd.read_csv(save_loss_trace(result.trace, tmp_path / 'loss.csv'))
    assert list(frame.columns) == ['step', 'loss', 'val_loss', 'val_accuracy']
    assert frame['val_loss'].notna().sum() == 6
