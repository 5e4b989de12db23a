"""Defaults for the sliding-window detector."""

# Scores averaged per decision (0.3 s of 0.01 s windows)
WINDOW_COUNT = 30
WINDOW_DURATION_S = 0.01
SLIDE_S = 0.1
# Chosen at the knee of the combined field-study ROC curve
THRESHOLD = 0.717

# A window is still judged when at least this share of its scores arrived
DEGRADED_MIN_FRACTION = 0.5

# Processing latency allowed beyond the data window
RESPONSE_BUDGET_S = 0.05
# Measured end-to-end system response (sensing, decision, stop command)
SYSTEM_RESPONSE_S = 0.15

# Pipeline chunking
PIPELINE_CHUNK_S = 0.01
