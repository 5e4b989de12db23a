"""Classifier defaults."""

# 0.01 s at 96 kHz
WINDOW_LENGTH = 960
N_CLASSES = 2
POSITIVE_CLASS = 1

# CNN architecture
CNN_LAYERS = 7
CNN_CHANNELS = 256
CNN_KERNEL_SIZE = 7
CNN_STRIDE = 2
CNN_IN_CHANNELS = 1
BN_MOMENTUM = 0.1

# CNN training
LEARNING_RATE = 1e-5
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8
POSITIVES_PER_BATCH = 16
NEGATIVES_PER_BATCH = 16
MAX_STEPS = 20000
EVAL_EVERY = 200
PATIENCE = 10
VALIDATION_FRACTION = 0.2
# Upper bound on windows scored per validation pass
VALIDATION_WINDOWS = 512

# SVM
SVM_C = 1.0
SVM_GAMMA = 0.5
KKT_TOLERANCE = 1e-3
SVM_MAX_ITER = 200000
# Curvature floor for degenerate pairs
SVM_TAU = 1e-12
SVM_MAX_TRAIN = 2000
N_FEATURES = 8
FEATURE_NAMES = (
    'mean',
    'std',
    'min',
    'max',
    'peak_count',
    'dominant_frequency_hz',
    'energy',
    'slope',
)

# Model container
MODEL_MAGIC = b'LSWM'
MODEL_FORMAT_VERSION = 1
METADATA_SUFFIX = '.json'
