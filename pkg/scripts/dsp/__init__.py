"""
Signal conditioning: bandpass, block analytic signal, envelope,
window normalization and CUSUM change detection.

Usage:
    from scripts.dsp import BandpassSpec, design_bandpass, apply_filter
    from scripts.dsp import analytic_blocks, envelope, detect_proximity

    taps = design_bandpass(BandpassSpec(), 96000)
    filtered = apply_filter(taps, received)
    env = envelope(analytic_blocks(filtered, 300), filtered.sample_rate_hz, filtered.start_time_s)
    result = detect_proximity(received)
"""

from .analytic import (
    AnalyticStream,
    BlockSmoother,
    analytic_blocks,
    analytic_rows,
    decimate_blocks,
    envelope,
    envelope_of,
    normalize_windows,
    phase_repeat_blocks,
    smooth_blocks,
)
from .bandpass import (
    BandpassFilter,
    FilterDesignError,
    apply_filter,
    design_bandpass,
    filter_aligned,
    group_delay_samples,
    response_db,
)
from .cusum import calibrate_cusum, cusum_reset, cusum_step, run_cusum
from .export import export_cusum_csv, export_envelope_csv
from .models import AnalyticFrame, BandpassSpec, CusumState
from .monitor import EnvelopeDetector, MonitorResult, block_trace, detect_proximity
from .stream import StreamPipeline

__all__ = [
    # Types
    'AnalyticFrame',
    'BandpassSpec',
    'CusumState',
    'MonitorResult',
    # Filtering
    'BandpassFilter',
    'FilterDesignError',
    'apply_filter',
    'design_bandpass',
    'filter_aligned',
    'group_delay_samples',
    'response_db',
    # Analytic signal
    'AnalyticStream',
    'BlockSmoother',
    'analytic_blocks',
    'analytic_rows',
    'decimate_blocks',
    'envelope',
    'envelope_of',
    'normalize_windows',
    'phase_repeat_blocks',
    'smooth_blocks',
    # CUSUM
    'EnvelopeDetector',
    'block_trace',
    'calibrate_cusum',
    'cusum_reset',
    'cusum_step',
    'detect_proximity',
    'run_cusum',
    # Streaming and export
    'StreamPipeline',
    'export_cusum_csv',
    'export_envelope_csv',
]
