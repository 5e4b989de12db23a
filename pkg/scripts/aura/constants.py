"""Command-line defaults."""

from pathlib import Path

VERSION = '0.1.0'

SUBCOMMANDS = ('simulate', 'train', 'eval', 'detect', 'report')

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Output locations
OUTPUT_ROOT_ENV = 'AURA_OUTPUT_ROOT'
DEFAULT_OUTPUT_DIR = Path('runs')
SNAPSHOT_NAME = 'config_snapshot.json'

# Files inside output directories
TRIALS_JSONL = 'trials.jsonl'
MODEL_NAME = 'model.lswm'
LOSS_CSV = 'loss.csv'
METRICS_CSV = 'metrics.csv'
SCENARIO_CSV = 'by_scenario.csv'
OBJECT_CSV = 'by_object.csv'
SCORES_JSONL = 'scores.jsonl'
ROC_CSV = 'roc.csv'
ROC_DAT = 'roc.dat'
THRESHOLD_JSON = 'threshold.json'
EVENTS_JSONL = 'events.jsonl'
LATENCY_JSON = 'latency.json'
STREAM_NAME = 'stream.wav'
STREAM_INFO = 'stream.json'
ENVELOPE_CSV = 'envelope.csv'
CUSUM_CSV = 'cusum.csv'

# Synthetic streams written by `simulate --stream`
STREAM_DURATION_S = 2.0
STREAM_CONTACT_S = 1.8
STREAM_SPEED_M_S = 0.3
STREAM_START_M = 0.5
STREAM_OBJECT = 'human_hand'

# Detect reads stdin in chunks of this many samples
STDIN_CHUNK_SAMPLES = 960

# Report: synthetic stream for the response-budget check
REPORT_STREAM_S = 3.0
# Envelope rows kept in envelope.csv: every n-th sample
REPORT_ENVELOPE_DECIMATE = 96
