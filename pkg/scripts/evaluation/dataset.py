"""
Field-study dataset construction.

Each positive trial simulates an approach that ends at contact and keeps
the 0.3 s of envelope that ends 0.2 s before impact. Each negative trial
simulates an obstacle-free run with the same noise and robot-motion
statistics and keeps a random 0.3 s. Every trial draws from its own child
of the master seed, so the manifest and segments depend only on the
scenario settings.
"""

import hashlib
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from scripts.common import atomic_write_json, fingerprint, validate_schema
from scripts.dsp import BandpassSpec, design_bandpass, envelope_of, filter_aligned
from scripts.lsw_sim import (
    ChannelModel,
    DisturbanceEvent,
    ExcitationConfig,
    NoiseRegime,
    ObstacleTrajectory,
    SampleBuffer,
    SelfDetectionEvent,
    gen_excitation,
    read_raw,
    simulate_received,
    write_raw,
)
from scripts.lsw_sim.constants import SAMPLE_RATE_HZ

from .constants import (
    AFTER_CONTACT_S,
    APPROACH_START_DISTANCE_M,
    CONTACT_TIME_RANGE_S,
    DAYS,
    DEFAULT_WORKERS,
    DISTURBANCE_DURATION_RANGE_S,
    MANIFEST_FORMAT_VERSION,
    MANIFEST_NAME,
    MOVING_ROBOT,
    NEGATIVE_DURATION_S,
    NEGATIVE_LEAD_S,
    PRE_IMPACT_START_S,
    SEGMENT_S,
    SEGMENTS_DIR,
    SELF_DETECTION_DISTANCE_RANGE_M,
    SELF_DETECTION_DURATION_RANGE_S,
)
from .harness import child_seed, run_parallel, trial_seeds
from .models import FieldDataset, ScenarioSpec, TrialRecord

logger = logging.getLogger(__name__)

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["format_version", "sample_rate_hz", "segment_samples", "signal", "scenarios", "trials"],
    "properties": {
        "format_version": {"type": "integer", "minimum": 1},
        "sample_rate_hz": {"type": "number", "exclusiveMinimum": 0},
        "segment_samples": {"type": "integer", "minimum": 1},
        "signal": {"type": "string", "enum": ["envelope"]},
        "scenarios": {"type": "array", "items": {"type": "object", "required": ["scenario", "seed"]}},
        "trials": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "label", "scenario", "day", "segment_file", "sha256"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "label": {"type": "integer", "enum": [0, 1]},
                    "scenario": {"type": "string"},
                    "day": {"type": "string"},
                    "object": {"type": ["string", "null"]},
                    "speed_m_s": {"type": ["number", "null"]},
                    "contact_time_s": {"type": ["number", "null"]},
                    "segment_file": {"type": "string"},
                    "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
                },
            },
        },
    },
}


@lru_cache(maxsize=4)
def _kernel(sample_rate_hz: float) -> np.ndarray:
    return design_bandpass(BandpassSpec(), sample_rate_hz)


def field_envelope(received: SampleBuffer) -> np.ndarray:
    """Bandpassed, delay-compensated block envelope of a whole trial."""
    return envelope_of(filter_aligned(_kernel(received.sample_rate_hz), received)).samples


def segment_digest(segment: np.ndarray) -> str:
    return hashlib.sha256(np.asarray(segment, dtype='<f4').tobytes()).hexdigest()


def robot_motion_schedule(
    regime: NoiseRegime, duration_s: float, rng: np.random.Generator
) -> Tuple[Tuple[DisturbanceEvent, ...], Tuple[SelfDetectionEvent, ...]]:
    """Poisson-timed channel disturbances and self-detections inside [0, duration_s]."""
    disturbances = []
    for _ in range(rng.poisson(regime.disturbance_rate_hz * duration_s)):
        length = min(rng.uniform(*DISTURBANCE_DURATION_RANGE_S), duration_s)
        start = rng.uniform(0.0, duration_s - length)
        magnitude = rng.uniform(*regime.disturbance_magnitude_range) * rng.choice((-1.0, 1.0))
        disturbances.append(DisturbanceEvent(start, length, float(magnitude)))
    self_detections = []
    for _ in range(rng.poisson(regime.self_detection_rate_hz * duration_s)):
        length = min(rng.uniform(*SELF_DETECTION_DURATION_RANGE_S), duration_s)
        start = rng.uniform(0.0, duration_s - length)
        distance = rng.uniform(*SELF_DETECTION_DISTANCE_RANGE_M)
        self_detections.append(SelfDetectionEvent(start, length, distance))
    return tuple(disturbances), tuple(self_detections)


def _robot_moves(scenario: str, index: int) -> bool:
    if scenario in MOVING_ROBOT:
        return True
    # Obstacle-free runs alternate between a still and a randomly moving arm
    return scenario == 'negative_only' and index % 2 == 1


def _channel(rng, seed, regime, reach, moving, duration_s) -> ChannelModel:
    disturbances, self_detections = robot_motion_schedule(regime, duration_s, rng) if moving else ((), ())
    return ChannelModel(
        rng_seed=child_seed(seed),
        phase_rad=float(rng.uniform(0, 2 * np.pi)),
        disturbance_events=disturbances,
        self_detection_events=self_detections,
    ).with_regime(regime).with_reach(reach)


def simulate_positive(
    spec: ScenarioSpec, index: int, seed: np.random.SeedSequence, sample_rate_hz: float = SAMPLE_RATE_HZ
) -> Tuple[TrialRecord, np.ndarray]:
    rng = np.random.default_rng(seed)
    profile = spec.object_profiles[index % len(spec.object_profiles)]
    day = DAYS[index % len(DAYS)]
    regime = NoiseRegime.preset(day)
    speed = float(rng.uniform(*spec.speed_range))
    contact = round(rng.uniform(*CONTACT_TIME_RANGE_S) * sample_rate_hz) / sample_rate_hz
    duration = contact + AFTER_CONTACT_S

    channel = _channel(rng, seed, regime, profile.cutoff_scale, spec.scenario in MOVING_ROBOT, duration)
    trajectory = ObstacleTrajectory.approach(
        APPROACH_START_DISTANCE_M, speed, contact, location_gain=profile.location_gain
    )
    excitation = gen_excitation(ExcitationConfig(sample_rate_hz=sample_rate_hz), duration)
    env = field_envelope(simulate_received(excitation, channel, trajectory))

    n = int(round(SEGMENT_S * sample_rate_hz))
    start = int(round((contact - PRE_IMPACT_START_S) * sample_rate_hz))
    if start < 0 or start + n > len(env):
        raise ValueError(f"contact at {contact:.3f}s leaves no pre-impact window inside {duration:.3f}s")
    segment = env[start:start + n]
    record = TrialRecord(
        id=index,
        label=1,
        scenario=spec.scenario,
        day=day,
        object=profile.name,
        speed_m_s=round(speed, 6),
        contact_time_s=contact,
        segment_start_s=start / sample_rate_hz,
        disturbances=len(channel.disturbance_events),
        self_detections=len(channel.self_detection_events),
    )
    return record, segment


def simulate_negative(
    spec: ScenarioSpec, index: int, seed: np.random.SeedSequence, sample_rate_hz: float = SAMPLE_RATE_HZ
) -> Tuple[TrialRecord, np.ndarray]:
    rng = np.random.default_rng(seed)
    day = DAYS[index % len(DAYS)]
    regime = NoiseRegime.preset(day)
    reach = 1.0
    if spec.object_profiles:
        reach = spec.object_profiles[int(rng.integers(len(spec.object_profiles)))].cutoff_scale
    channel = _channel(rng, seed, regime, reach, _robot_moves(spec.scenario, index), NEGATIVE_DURATION_S)
    excitation = gen_excitation(ExcitationConfig(sample_rate_hz=sample_rate_hz), NEGATIVE_DURATION_S)
    env = field_envelope(simulate_received(excitation, channel))

    n = int(round(SEGMENT_S * sample_rate_hz))
    lo = int(round(NEGATIVE_LEAD_S * sample_rate_hz))
    start = int(rng.integers(lo, len(env) - n + 1))
    record = TrialRecord(
        id=index,
        label=0,
        scenario=spec.scenario,
        day=day,
        segment_start_s=start / sample_rate_hz,
        disturbances=len(channel.disturbance_events),
        self_detections=len(channel.self_detection_events),
    )
    return record, env[start:start + n]


def build_field_dataset(
    spec: ScenarioSpec,
    workers: int = DEFAULT_WORKERS,
    progress: bool = True,
    sample_rate_hz: float = SAMPLE_RATE_HZ,
) -> FieldDataset:
    """Simulate every trial of one scenario; positives first, then negatives."""
    n_pos, n_neg = spec.n_positives, spec.n_negatives
    seeds = trial_seeds(spec.seed, n_pos + n_neg)
    jobs = [(simulate_positive, k, seeds[k]) for k in range(n_pos)]
    jobs += [(simulate_negative, n_pos + k, seeds[n_pos + k]) for k in range(n_neg)]

    def run(job):
        fn, index, seed = job
        return fn(spec, index, seed, sample_rate_hz)

    logger.info(f"Simulating {spec.scenario}: {n_pos} positive + {n_neg} negative trials (seed {spec.seed})")
    results = run_parallel(run, jobs, workers=workers, desc=spec.scenario, progress=progress)
    return _assemble([spec], [r for r, _ in results], [s for _, s in results], sample_rate_hz)


def _assemble(specs, records: List[TrialRecord], segments: List[np.ndarray], sample_rate_hz: float) -> FieldDataset:
    trials, stored = [], {}
    for new_id, (record, segment) in enumerate(zip(records, segments)):
        record.id = new_id
        record.segment_file = f"{SEGMENTS_DIR}/trial_{new_id:05d}.f32"
        record.sha256 = segment_digest(segment)
        trials.append(record.to_dict())
        stored[new_id] = np.asarray(segment, dtype=np.float32)
    manifest = {
        "format_version": MANIFEST_FORMAT_VERSION,
        "sample_rate_hz": sample_rate_hz,
        "segment_samples": int(round(SEGMENT_S * sample_rate_hz)),
        "signal": "envelope",
        "scenarios": [s.to_dict() for s in specs],
        "trials": trials,
    }
    return FieldDataset(manifest=manifest, segments=stored)


def combine_datasets(datasets: Sequence[FieldDataset]) -> FieldDataset:
    """One dataset over several scenarios; trial ids are renumbered in order."""
    if not datasets:
        raise ValueError("nothing to combine")
    rates = {d.manifest['sample_rate_hz'] for d in datasets}
    if len(rates) > 1:
        raise ValueError(f"datasets disagree on sample rate: {sorted(rates)}")
    records, segments, specs = [], [], []
    for dataset in datasets:
        specs.extend(dataset.manifest['scenarios'])
        for trial in dataset.trials:
            fields = {k: v for k, v in trial.items() if k in TrialRecord.__dataclass_fields__}
            records.append(TrialRecord(**fields))
            segments.append(dataset.segments[trial['id']])
    combined = _assemble([], records, segments, rates.pop())
    combined.manifest['scenarios'] = specs
    return combined


def dataset_fingerprint(dataset: FieldDataset) -> str:
    return fingerprint(dataset.manifest)


def write_dataset(dataset: FieldDataset, out_dir: Path) -> Path:
    """Segments as raw float32 files plus manifest.json; returns the manifest path."""
    out_dir = Path(out_dir)
    rate = dataset.manifest['sample_rate_hz']
    for trial in dataset.trials:
        segment = dataset.segments[trial['id']]
        write_raw(SampleBuffer(segment.astype(float), rate, trial['segment_start_s']), out_dir / trial['segment_file'])
    path = atomic_write_json(out_dir / MANIFEST_NAME, dataset.manifest)
    logger.info(f"Wrote {len(dataset.trials)} trials to {out_dir} (fingerprint {dataset_fingerprint(dataset)[:12]})")
    return path


def load_dataset(root: Path, verify: bool = True) -> FieldDataset:
    """Read a dataset directory (or its manifest path) and check segment digests."""
    root = Path(root)
    manifest_path = root if root.is_file() else root / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"Dataset manifest not found: {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding='utf-8'))
    ok, error = validate_schema(manifest, MANIFEST_SCHEMA)
    if not ok:
        raise ValueError(f"Invalid manifest {manifest_path}: {error}")
    segments = {}
    for trial in manifest['trials']:
        samples = read_raw(manifest_path.parent / trial['segment_file']).samples.astype(np.float32)
        if verify and segment_digest(samples) != trial['sha256']:
            raise ValueError(f"segment of trial {trial['id']} does not match its manifest digest")
        segments[trial['id']] = samples
    return FieldDataset(manifest=manifest, segments=segments)


def labeled_segments(dataset: FieldDataset, ids: Optional[Sequence[int]] = None):
    """(positives, negatives) segment lists for the given trial ids."""
    chosen = set(dataset.ids() if ids is None else ids)
    positives = [dataset.segments[t['id']] for t in dataset.trials if t['id'] in chosen and t['label'] == 1]
    negatives = [dataset.segments[t['id']] for t in dataset.trials if t['id'] in chosen and t['label'] == 0]
    return positives, negatives
