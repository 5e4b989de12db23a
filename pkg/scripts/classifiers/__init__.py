"""
Window classifiers: a 7-layer 1D CNN (torch) and an RBF SVM (SMO).

Usage:
    from scripts.classifiers import CnnConfig, TrainConfig, WindowSource, cnn_train
    from scripts.classifiers import save_model, load_model, predict_windows

    source = WindowSource(positive_sequences, negative_sequences)
    result = cnn_train(source, CnnConfig(), TrainConfig(), seed=0)
    save_model(result.model, Path('model.lswm'), training_seed=0)
    scores = predict_windows(load_model(Path('model.lswm'))[0], windows)
"""

from .cnn import AuraCnn, CnnConfig, cnn_forward, create_model, layer_lengths, scores_from_logits
from .errors import ConvergenceError, TrainingError
from .features import window_features, windows_features
from .model_io import decode_model, encode_model, load_model, metadata_path, save_model
from .models import SvmModel, WindowSample
from .predict import predict_windows
from .svm import rbf_kernel, svm_margin, svm_predict, svm_train
from .training import (
    TrainConfig,
    TrainResult,
    WindowSource,
    cnn_gradients,
    cnn_train,
    evaluate,
    save_loss_trace,
)

__all__ = [
    # CNN
    'AuraCnn',
    'CnnConfig',
    'cnn_forward',
    'create_model',
    'layer_lengths',
    'scores_from_logits',
    # Training
    'TrainConfig',
    'TrainResult',
    'WindowSource',
    'cnn_gradients',
    'cnn_train',
    'evaluate',
    'save_loss_trace',
    # SVM
    'SvmModel',
    'rbf_kernel',
    'svm_margin',
    'svm_predict',
    'svm_train',
    'window_features',
    'windows_features',
    # Shared
    'WindowSample',
    'ConvergenceError',
    'TrainingError',
    'decode_model',
    'encode_model',
    'load_model',
    'metadata_path',
    'predict_windows',
    'save_model',
]
