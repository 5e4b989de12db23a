"""
Evaluation harness: field-study datasets, micro-benchmark sweeps, ROC and
TPR/TNR tables, and the approach speed limit.

Usage:
    from scripts.evaluation import ScenarioSpec, build_field_dataset, evaluate_dataset

    dataset = build_field_dataset(ScenarioSpec('static_robot_moving_object', object_profiles=profiles, seed=7))
    result = evaluate_dataset(model, dataset)
    print(result.table)
"""

from .dataset import (
    MANIFEST_SCHEMA,
    build_field_dataset,
    combine_datasets,
    dataset_fingerprint,
    field_envelope,
    labeled_segments,
    load_dataset,
    robot_motion_schedule,
    segment_digest,
    simulate_negative,
    simulate_positive,
    write_dataset,
)
from .evaluate import (
    EvaluationResult,
    evaluate_dataset,
    evaluate_scores,
    normalized_segment,
    segment_windows,
    train_classifier,
    trial_scores,
    window_source,
)
from .export import write_csv, write_gnuplot, write_jsonl, write_roc_csv, write_roc_gnuplot
from .harness import child_seed, run_parallel, trial_seeds
from .metrics import compute_roc, detector_threshold, max_speed, rates, table_one, tpr_tnr
from .models import FieldDataset, MicroTrial, RocCurve, ScenarioSpec, SweepPoint, TrialRecord
from .splits import check_disjoint, per_object_tpr, split_by_day, split_by_object
from .sweeps import (
    angle_sweep,
    location_sweep,
    material_sweep,
    micro_benchmark_max_distance,
    run_micro_benchmark,
    run_micro_trial,
    summarize_micro,
)

__all__ = [
    # Types
    'FieldDataset',
    'MicroTrial',
    'RocCurve',
    'ScenarioSpec',
    'SweepPoint',
    'TrialRecord',
    # Dataset
    'MANIFEST_SCHEMA',
    'build_field_dataset',
    'combine_datasets',
    'dataset_fingerprint',
    'field_envelope',
    'labeled_segments',
    'load_dataset',
    'robot_motion_schedule',
    'segment_digest',
    'simulate_negative',
    'simulate_positive',
    'write_dataset',
    # Splits
    'check_disjoint',
    'per_object_tpr',
    'split_by_day',
    'split_by_object',
    # Training and scoring
    'EvaluationResult',
    'evaluate_dataset',
    'evaluate_scores',
    'normalized_segment',
    'segment_windows',
    'train_classifier',
    'trial_scores',
    'window_source',
    # Metrics
    'compute_roc',
    'detector_threshold',
    'max_speed',
    'rates',
    'table_one',
    'tpr_tnr',
    # Sweeps
    'angle_sweep',
    'location_sweep',
    'material_sweep',
    'micro_benchmark_max_distance',
    'run_micro_benchmark',
    'run_micro_trial',
    'summarize_micro',
    # Harness and export
    'child_seed',
    'run_parallel',
    'trial_seeds',
    'write_csv',
    'write_gnuplot',
    'write_jsonl',
    'write_roc_csv',
    'write_roc_gnuplot',
]
