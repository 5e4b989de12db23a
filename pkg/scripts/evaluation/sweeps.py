"""
Micro-benchmark sweeps: maximum CUSUM detection distance per setting.

Every trial calibrates the CUSUM on the quiet lab rig while the obstacle is
still out of reach, then moves it toward the surface at about 2 cm/s. The
detection distance is where the obstacle was when the CUSUM alarmed; a
trial without an alarm counts as a non-detection at distance 0.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from scripts.dsp import BandpassSpec, EnvelopeDetector, design_bandpass
from scripts.lsw_sim import (
    Catalog,
    ChannelModel,
    ExcitationConfig,
    NoiseRegime,
    ObstacleTrajectory,
    gen_excitation,
    simulate_received,
)
from scripts.lsw_sim.constants import SAMPLE_RATE_HZ

from .constants import (
    DEFAULT_WORKERS,
    MICRO_REGIME,
    MICRO_SPEED_JITTER,
    MICRO_SPEED_M_S,
    MICRO_START_DISTANCE_M,
    MICRO_TRIALS,
)
from .harness import child_seed, run_parallel, trial_seeds
from .models import MicroTrial, SweepPoint

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    'sweep',
    'label',
    'value',
    'location_gain',
    'max_distance_cm',
    'mean_distance_cm',
    'detections',
    'trials',
]
# Obstacle keeps going this long after contact
TAIL_S = 0.05


def angle_sweep(catalog: Catalog) -> List[SweepPoint]:
    return [
        SweepPoint(sweep='angle', label=f"{angle:g} deg", value=angle, location_gain=gain)
        for angle, gain in sorted(catalog.angles.items())
    ]


def location_sweep(catalog: Catalog) -> List[SweepPoint]:
    return [
        SweepPoint(sweep='location', label=f"{offset:g} cm", value=offset, location_gain=gain)
        for offset, gain in sorted(catalog.locations.items())
    ]


def material_sweep(catalog: Catalog) -> List[SweepPoint]:
    """One point per material; materials that carry no leaky wave get gain 0."""
    return [
        SweepPoint(
            sweep='material',
            label=m.name,
            value=float(i + 1),
            location_gain=1.0 if m.couples else 0.0,
            cutoff_scale=m.cutoff_scale,
            surface_gain=m.surface_gain,
        )
        for i, m in enumerate(catalog.materials)
    ]


def run_micro_trial(
    point: SweepPoint,
    trial: int,
    seed: np.random.SeedSequence,
    sample_rate_hz: float = SAMPLE_RATE_HZ,
    kernel: Optional[np.ndarray] = None,
) -> MicroTrial:
    rng = np.random.default_rng(seed)
    speed = MICRO_SPEED_M_S * (1 + rng.uniform(-MICRO_SPEED_JITTER, MICRO_SPEED_JITTER))
    start_distance = MICRO_START_DISTANCE_M * point.cutoff_scale
    contact = start_distance / speed
    channel = ChannelModel(
        surface_gain=point.surface_gain,
        rng_seed=child_seed(seed),
        phase_rad=float(rng.uniform(0, 2 * np.pi)),
    ).with_regime(NoiseRegime.preset(MICRO_REGIME)).with_reach(point.cutoff_scale)
    trajectory = ObstacleTrajectory.approach(start_distance, speed, contact, location_gain=point.location_gain)

    excitation = gen_excitation(ExcitationConfig(sample_rate_hz=sample_rate_hz), contact + TAIL_S)
    received = simulate_received(excitation, channel, trajectory)
    result = EnvelopeDetector(sample_rate_hz, kernel=kernel).run(received)

    # Alarms after contact are not proximity detections
    alarm = result.alarm_time_s if result.alarmed and result.alarm_time_s <= contact else None
    distance = float(trajectory.distance_at(alarm)) if alarm is not None else 0.0
    logger.debug(f"{point.label} trial {trial}: speed {speed:.4f} m/s, distance {distance * 100:.1f} cm")
    return MicroTrial(point=point, trial=trial, speed_m_s=speed, alarm_time_s=alarm, distance_m=distance)


def run_micro_benchmark(
    points: Sequence[SweepPoint],
    trials_per_point: int = MICRO_TRIALS,
    seed: int = 0,
    workers: int = DEFAULT_WORKERS,
    progress: bool = True,
    sample_rate_hz: float = SAMPLE_RATE_HZ,
) -> List[MicroTrial]:
    if trials_per_point < 1:
        raise ValueError(f"trials_per_point must be >= 1, got {trials_per_point}")
    kernel = design_bandpass(BandpassSpec(), sample_rate_hz)
    seeds = trial_seeds(seed, len(points) * trials_per_point)
    jobs = [
        (point, k, seeds[p * trials_per_point + k])
        for p, point in enumerate(points)
        for k in range(trials_per_point)
    ]
    return run_parallel(
        lambda job: run_micro_trial(*job, sample_rate_hz=sample_rate_hz, kernel=kernel),
        jobs,
        workers=workers,
        desc="Micro-benchmark",
        progress=progress,
    )


def summarize_micro(trials: Sequence[MicroTrial]) -> pd.DataFrame:
    """One row per sweep point, in first-seen order."""
    rows = {}
    for t in trials:
        key = (t.point.sweep, t.point.label)
        rows.setdefault(key, (t.point, []))[1].append(t)
    records = []
    for point, group in rows.values():
        detected = [t.distance_m for t in group if t.detected]
        records.append({
            'sweep': point.sweep,
            'label': point.label,
            'value': point.value,
            'location_gain': point.location_gain,
            'max_distance_cm': round(100 * max(detected), 2) if detected else 0.0,
            'mean_distance_cm': round(100 * float(np.mean(detected)), 2) if detected else 0.0,
            'detections': len(detected),
            'trials': len(group),
        })
    return pd.DataFrame(records, columns=SWEEP_COLUMNS)


def micro_benchmark_max_distance(
    points: Sequence[SweepPoint],
    trials_per_point: int = MICRO_TRIALS,
    seed: int = 0,
    workers: int = DEFAULT_WORKERS,
    progress: bool = True,
) -> pd.DataFrame:
    """Maximum (and mean) detection distance per sweep point."""
    trials = run_micro_benchmark(points, trials_per_point, seed, workers, progress)
    table = summarize_micro(trials)
    for row in table.itertuples():
        logger.info(f"{row.sweep} {row.label}: max {row.max_distance_cm:.1f} cm ({row.detections}/{row.trials})")
    return table
