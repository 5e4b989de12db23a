"""Defaults for the leaky-surface-wave signal simulator."""

from pathlib import Path

# Excitation and recording chain
SAMPLE_RATE_HZ = 96000.0
EXCITATION_FREQUENCY_HZ = 19000.0
EXCITATION_AMPLITUDE = 1.0

# Leaky field
SOUND_SPEED_M_S = 343.0
LEAK_FRACTION = 0.02
DECAY_LENGTH_M = 0.03
DETECTION_CUTOFF_M = 0.10
STANDING_WAVE_PHASE_RAD = 0.0

# Over-the-air path when the transmitter is detached from the surface
AIR_PATH_ATTENUATION = 60.0
AIR_JITTER_RATE_HZ = 100.0

# Noise spectrum
MECHANICAL_CORNER_HZ = 15000.0
MECHANICAL_TRANSITION_HZ = 1000.0
MECHANICAL_STOP_DB = 80.0
ELECTRICAL_TONE_HZ = 30000.0

# Self-detection: the virtual linkage distance starts this many cutoffs away
SELF_DETECTION_START_CUTOFFS = 3.0

# Noise regimes: quiet lab rig and two field-study recording days
NOISE_REGIMES = {
    'lab': {
        'mechanical_noise_level': 0.05,
        'electrical_tone_level': 0.02,
        'floor_level': 1e-5,
        'disturbance_rate_hz': 0.0,
        'disturbance_magnitude_range': (0.0, 0.0),
        'self_detection_rate_hz': 0.0,
    },
    'day1': {
        'mechanical_noise_level': 0.3,
        'electrical_tone_level': 0.05,
        'floor_level': 2e-4,
        'disturbance_rate_hz': 0.5,
        'disturbance_magnitude_range': (0.002, 0.01),
        'self_detection_rate_hz': 0.2,
    },
    'day2': {
        'mechanical_noise_level': 0.5,
        'electrical_tone_level': 0.08,
        'floor_level': 3e-4,
        'disturbance_rate_hz': 0.7,
        'disturbance_magnitude_range': (0.003, 0.015),
        'self_detection_rate_hz': 0.3,
    },
}
DEFAULT_REGIME = 'lab'

# Catalog of objects, materials, angles and locations
DEFAULT_CATALOG_PATH = Path(__file__).resolve().parents[2] / 'data' / 'objects.yaml'

# Raw float32 interchange
RAW_SUFFIX = '.f32'
WAV_SUFFIX = '.wav'
