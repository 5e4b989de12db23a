"""Defaults for the evaluation harness."""

SCENARIOS = (
    'static_robot_moving_object',
    'moving_robot_static_object',
    'moving_robot_moving_object',
    'negative_only',
)

# Desk-scale trial counts per scenario (positives; negatives match by default)
TRIALS_PER_SCENARIO = 200

# Positive datapoint: the 0.3 s that ends 0.2 s before impact
PRE_IMPACT_START_S = 0.5
PRE_IMPACT_END_S = 0.2
SEGMENT_S = PRE_IMPACT_START_S - PRE_IMPACT_END_S

# Field-trial timeline
CONTACT_TIME_RANGE_S = (1.0, 1.4)
AFTER_CONTACT_S = 0.05
NEGATIVE_DURATION_S = 1.2
NEGATIVE_LEAD_S = 0.3
APPROACH_START_DISTANCE_M = 0.5

# Relative approach speeds (m/s) per scenario; the arm moves at most 0.2 m/s
SPEED_RANGES = {
    'static_robot_moving_object': (0.10, 0.40),
    'moving_robot_static_object': (0.05, 0.20),
    'moving_robot_moving_object': (0.10, 0.50),
    'negative_only': (0.10, 0.40),
}
MOVING_ROBOT = {'moving_robot_static_object', 'moving_robot_moving_object'}

# Robot-motion event shapes
DISTURBANCE_DURATION_RANGE_S = (0.2, 0.6)
SELF_DETECTION_DURATION_RANGE_S = (0.3, 0.8)
SELF_DETECTION_DISTANCE_RANGE_M = (0.03, 0.08)

# Recording days of the field study
DAYS = ('day1', 'day2')

# Micro-benchmark: slow constant-velocity approach on the quiet rig
MICRO_TRIALS = 13
MICRO_SPEED_M_S = 0.02
MICRO_SPEED_JITTER = 0.10
MICRO_START_DISTANCE_M = 0.30
MICRO_REGIME = 'lab'

# Speed limit
SYSTEM_RESPONSE_S = 0.15

# Files
MANIFEST_NAME = 'manifest.json'
SEGMENTS_DIR = 'segments'
MANIFEST_FORMAT_VERSION = 1
DEFAULT_WORKERS = 4
