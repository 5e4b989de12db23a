"""Defaults for the signal-conditioning chain."""

# Narrow bandpass around the excitation
BANDPASS_CENTER_HZ = 19000.0
BANDPASS_HALFWIDTH_HZ = 250.0
BANDPASS_STOP_DB = 60.0
BANDPASS_TRANSITION_HZ = 1000.0
# Extra attenuation asked of the Kaiser design so the checked stopband holds
BANDPASS_DESIGN_MARGIN_DB = 6.0
PASSBAND_TOLERANCE_DB = 0.5
# Frequencies the stopband is checked at: mechanical noise ceiling and electrical spike
STOPBAND_CHECK_HZ = (15000.0, 30000.0)

# Block analytic signal
BLOCK_LENGTH = 300
MIN_BLOCK_LENGTH = 8
INTERIOR_FRACTION = 0.5
MAX_PHASE_REPEAT_BLOCKS = 64

# Classifier input normalization
NORMALIZE_WINDOW_S = 0.3
SIGMA_FLOOR = 1e-12

# CUSUM on the block-rate envelope
CUSUM_K_SIGMA = 0.5
CUSUM_H_SIGMA = 5.0
CUSUM_CALIBRATION_S = 1.0
# Minimum resolvable modulation depth relative to the carrier level.
# Tuned once so the perpendicular stick approach alarms at about 18.3 cm.
CUSUM_SIGMA_FLOOR_RATIO = 5e-5

# Stage hand-off
FIFO_DEPTH = 8
STREAM_CHUNK_SAMPLES = 9600
