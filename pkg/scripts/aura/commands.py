"""The five subcommands. Each takes a resolved RunConfig and returns an exit code."""

import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from prettytable import PrettyTable

from scripts.classifiers import AuraCnn, CnnConfig, TrainConfig, create_model, load_model, predict_windows, save_model
from scripts.classifiers import evaluate as cnn_accuracy
from scripts.common import StageLogger, atomic_write_json, log_summary
from scripts.detector import (
    DetectionPipeline,
    DetectorConfig,
    EventCollector,
    JsonLinesSink,
    LatencyTracker,
    StopChannelSink,
    response_budget_check,
)
from scripts.dsp import detect_proximity, export_cusum_csv, export_envelope_csv
from scripts.evaluation import (
    FieldDataset,
    ScenarioSpec,
    angle_sweep,
    build_field_dataset,
    child_seed,
    combine_datasets,
    dataset_fingerprint,
    evaluate_dataset,
    field_envelope,
    load_dataset,
    location_sweep,
    material_sweep,
    micro_benchmark_max_distance,
    split_by_day,
    split_by_object,
    train_classifier,
    trial_seeds,
    window_source,
    write_csv,
    write_dataset,
    write_gnuplot,
    write_jsonl,
    write_roc_csv,
    write_roc_gnuplot,
)
from scripts.evaluation.metrics import MOVING_OBJECT_SCENARIOS
from scripts.lsw_sim import (
    ChannelModel,
    ExcitationConfig,
    NoiseRegime,
    ObjectProfile,
    ObstacleTrajectory,
    SampleBuffer,
    gen_excitation,
    load_catalog,
    read_buffer,
    simulate_received,
    write_wav,
)
from scripts.lsw_sim.constants import SAMPLE_RATE_HZ

from .config import ConfigError, RunConfig, UsageError
from .constants import (
    CUSUM_CSV,
    ENVELOPE_CSV,
    EVENTS_JSONL,
    EXIT_OK,
    LATENCY_JSON,
    LOSS_CSV,
    METRICS_CSV,
    MODEL_NAME,
    OBJECT_CSV,
    REPORT_ENVELOPE_DECIMATE,
    REPORT_STREAM_S,
    ROC_CSV,
    ROC_DAT,
    SCENARIO_CSV,
    SCORES_JSONL,
    STDIN_CHUNK_SAMPLES,
    STREAM_CONTACT_S,
    STREAM_DURATION_S,
    STREAM_INFO,
    STREAM_NAME,
    STREAM_OBJECT,
    STREAM_SPEED_M_S,
    STREAM_START_M,
    THRESHOLD_JSON,
    TRIALS_JSONL,
)
from .rundir import RunDirectory, write_snapshot

logger = logging.getLogger(__name__)


def _progress(cfg: RunConfig) -> bool:
    return not cfg.quiet and sys.stderr.isatty()


def _print_table(title: str, header: List[str], rows) -> None:
    table = PrettyTable()
    table.title = title
    table.field_names = header
    for row in rows:
        table.add_row(list(row))
    print(table)


# simulate

def _object_profiles(cfg: RunConfig):
    catalog = load_catalog(Path(cfg.catalog) if cfg.catalog else None)
    if not cfg.objects:
        return tuple(catalog.objects)
    try:
        return tuple(catalog.object(name) for name in cfg.objects)
    except KeyError as e:
        raise ConfigError(str(e.args[0]), path=cfg.config_path) from e


def scenario_specs(cfg: RunConfig) -> List[ScenarioSpec]:
    """One spec per configured scenario, each on its own seed derived from the run seed."""
    profiles = _object_profiles(cfg)
    seeds = trial_seeds(cfg.seed, len(cfg.scenarios))
    specs = []
    for scenario, seed in zip(cfg.scenarios, seeds):
        try:
            specs.append(ScenarioSpec(
                scenario,
                trials=cfg.trials,
                object_profiles=() if scenario == 'negative_only' else profiles,
                approach_speed_range_m_s=cfg.speed_range,
                seed=child_seed(seed),
                negatives=cfg.negatives,
            ))
        except ValueError as e:
            raise ConfigError(f"scenario {scenario}: {e}", path=cfg.config_path) from e
    return specs


def _stream_object(cfg: RunConfig) -> ObjectProfile:
    """First configured object, else the operator's hand."""
    catalog = load_catalog(Path(cfg.catalog) if cfg.catalog else None)
    name = cfg.objects[0] if cfg.objects else STREAM_OBJECT
    try:
        return catalog.object(name)
    except KeyError as e:
        raise ConfigError(str(e.args[0]), path=cfg.config_path) from e


def synthetic_stream(kind: str, seed: int, profile: ObjectProfile) -> Tuple[SampleBuffer, Dict]:
    """
    A whole received recording: the profiled object approaching until contact,
    or an obstacle-free run under the same channel.
    """
    channel = ChannelModel(rng_seed=seed).with_regime(NoiseRegime.preset('day1')).with_reach(profile.cutoff_scale)
    excitation = gen_excitation(ExcitationConfig(), STREAM_DURATION_S)
    info = {'kind': kind, 'seed': seed, 'sample_rate_hz': SAMPLE_RATE_HZ, 'duration_s': STREAM_DURATION_S}
    trajectory = None
    if kind == 'approach':
        trajectory = ObstacleTrajectory.approach(
            STREAM_START_M, STREAM_SPEED_M_S, STREAM_CONTACT_S, location_gain=profile.location_gain
        )
        info.update(
            object=profile.name,
            start_distance_m=STREAM_START_M,
            contact_time_s=STREAM_CONTACT_S,
            speed_m_s=STREAM_SPEED_M_S,
            pre_impact_window_s=[STREAM_CONTACT_S - 0.5, STREAM_CONTACT_S - 0.2],
        )
    return simulate_received(excitation, channel, trajectory), info


def cmd_simulate(cfg: RunConfig) -> int:
    with RunDirectory(cfg.out, cfg.overwrite) as out:
        if cfg.stream:
            buffer, info = synthetic_stream(cfg.stream, cfg.seed, _stream_object(cfg))
            write_wav(buffer, out / STREAM_NAME)
            atomic_write_json(out / STREAM_INFO, info)
        else:
            datasets = []
            for spec in scenario_specs(cfg):
                with StageLogger(f"simulate {spec.scenario}", logger) as stage:
                    datasets.append(build_field_dataset(spec, cfg.workers, _progress(cfg)))
                    stage.add_detail('trials', len(datasets[-1].trials))
            dataset = datasets[0] if len(datasets) == 1 else combine_datasets(datasets)
            write_dataset(dataset, out)
            write_jsonl(dataset.trials, out / TRIALS_JSONL)
            log_summary(logger, "Dataset", [
                ('Scenarios', ', '.join(cfg.scenarios)),
                ('Positives', len(dataset.ids(label=1))),
                ('Negatives', len(dataset.ids(label=0))),
                ('Fingerprint', dataset_fingerprint(dataset)),
            ])
        write_snapshot(out, cfg)
    return EXIT_OK


# train

def _require(path: Optional[Path], flag: str) -> Path:
    if path is None:
        raise UsageError(f"{flag} is required")
    return path


def choose_split(dataset: FieldDataset, kind: str) -> Tuple[str, List[int], List[int]]:
    """Train/test ids; 'auto' splits by object when moving objects are present, else by day."""
    if kind == 'auto':
        moving = {t['object'] for t in dataset.trials if t['label'] == 1 and t['scenario'] in MOVING_OBJECT_SCENARIOS}
        days = {t['day'] for t in dataset.trials}
        kind = 'object' if len(moving) >= 2 else ('day' if len(days) >= 2 else 'none')
    if kind == 'object':
        train, test = split_by_object(dataset)
    elif kind == 'day':
        train, test = split_by_day(dataset)
    else:
        train, test = dataset.ids(), []
    return kind, train, test


def _window_accuracy(model, dataset: FieldDataset, ids: List[int]) -> float:
    x, y = window_source(dataset, ids).all_windows()
    if isinstance(model, AuraCnn):
        return cnn_accuracy(model, x, y)[1]
    scores = predict_windows(model, x, dataset.manifest['sample_rate_hz'])
    return float(np.mean((scores > 0.5) == (y == 1)))


def cmd_train(cfg: RunConfig) -> int:
    dataset = load_dataset(_require(cfg.dataset, '--dataset'))
    kind, train_ids, test_ids = choose_split(dataset, cfg.split)
    cnn_config = CnnConfig(layers=cfg.cnn_layers, channels=cfg.cnn_channels)
    train_config = TrainConfig(
        learning_rate=cfg.learning_rate, max_steps=cfg.max_steps, eval_every=cfg.eval_every, patience=cfg.patience
    )
    with RunDirectory(cfg.out, cfg.overwrite) as out:
        with StageLogger(f"train {cfg.classifier}", logger) as stage:
            model, trace = train_classifier(
                dataset, train_ids, cfg.classifier, cfg.seed, cnn_config, train_config, _progress(cfg)
            )
            accuracy = _window_accuracy(model, dataset, train_ids)
            stage.add_detail('split', f"{kind}: {len(train_ids)} train / {len(test_ids)} test trials")
            stage.add_detail('train window accuracy', f"{accuracy:.2%}")
        hyperparameters = {
            'classifier': cfg.classifier,
            'split': kind,
            'train_ids': train_ids,
            'test_ids': test_ids,
        }
        if cfg.classifier == 'cnn':
            hyperparameters['train'] = train_config.as_dict()
        save_model(
            model,
            out / MODEL_NAME,
            hyperparameters=hyperparameters,
            training_seed=cfg.seed,
            dataset_fingerprint=dataset_fingerprint(dataset),
            metrics={'train_window_accuracy': accuracy},
        )
        if trace is not None:
            write_csv(trace, out / LOSS_CSV)
        write_snapshot(out, cfg)
    return EXIT_OK


# eval

def evaluation_ids(cfg: RunConfig, dataset: FieldDataset, metadata: Dict) -> List[int]:
    """Trials to score, refusing training trials unless explicitly allowed."""
    fingerprint = dataset_fingerprint(dataset)
    trained_on = metadata.get('dataset_fingerprint')
    if trained_on != fingerprint:
        logger.warning(f"Model was trained on dataset {str(trained_on)[:12]}, evaluating on {fingerprint[:12]}")
        if not cfg.allow_mismatch:
            raise UsageError("model and dataset fingerprints differ; pass --allow-mismatch to evaluate anyway")
        return dataset.ids()

    hyper = metadata.get('hyperparameters', {})
    train_ids, test_ids = hyper.get('train_ids', []), hyper.get('test_ids', [])
    ids = {'test': test_ids, 'train': train_ids, 'all': dataset.ids()}[cfg.on]
    if set(ids) & set(train_ids) and not cfg.allow_train_eval:
        raise UsageError(f"--on {cfg.on} includes the model's training trials; pass --allow-train-eval")
    if not ids:
        raise UsageError(f"no {cfg.on} trials to evaluate")
    return list(ids)


def cmd_eval(cfg: RunConfig) -> int:
    model, metadata = load_model(_require(cfg.model, '--model'))
    dataset = load_dataset(_require(cfg.dataset, '--dataset'))
    ids = evaluation_ids(cfg, dataset, metadata)
    labels = {dataset.trial(i)['label'] for i in ids}
    if labels != {0, 1}:
        raise UsageError("evaluation needs positive and negative trials")

    result = evaluate_dataset(model, dataset, ids, DetectorConfig(), cfg.threshold, _progress(cfg))
    with RunDirectory(cfg.out, cfg.overwrite) as out:
        write_csv(result.table, out / METRICS_CSV)
        write_csv(result.by_scenario, out / SCENARIO_CSV)
        write_csv(result.by_object, out / OBJECT_CSV)
        write_roc_csv(result.roc, out / ROC_CSV)
        write_roc_gnuplot(result.roc, out / ROC_DAT)
        decisions = result.decisions
        write_jsonl(
            [dict(row, decision=bool(decisions[row['id']])) for row in result.scores.to_dict('records')],
            out / SCORES_JSONL,
        )
        best = result.roc.best_index
        atomic_write_json(out / THRESHOLD_JSON, {
            'threshold': result.threshold,
            'selected_by': 'flag' if cfg.threshold is not None else 'roc',
            'roc_threshold': result.roc.best_threshold if np.isfinite(result.roc.best_threshold) else None,
            'roc_tpr': float(result.roc.tpr[best]),
            'roc_fpr': float(result.roc.fpr[best]),
            'auc': result.roc.area_under_curve,
            'trials': len(ids),
        })
        write_snapshot(out, cfg)
    _print_table("Detection rates", ['Metric', 'Value'], result.summary_rows())
    return EXIT_OK


# detect

def _read_stdin(pipeline: DetectionPipeline) -> None:
    stream = sys.stdin.buffer
    chunk_bytes = STDIN_CHUNK_SAMPLES * 4
    pending = b''
    while True:
        data = stream.read(chunk_bytes)
        if not data:
            break
        data = pending + data
        usable = len(data) - len(data) % 4
        pending = data[usable:]
        pipeline.process(np.frombuffer(data[:usable], dtype='<f4').astype(float))


def cmd_detect(cfg: RunConfig) -> int:
    model, _ = load_model(_require(cfg.model, '--model'))
    source = _require(cfg.input, '--input')
    buffer = None
    if source != '-':
        buffer = read_buffer(Path(source))
        if buffer.sample_rate_hz != SAMPLE_RATE_HZ:
            raise UsageError(f"input sample rate {buffer.sample_rate_hz:g} Hz, expected {SAMPLE_RATE_HZ:g} Hz")

    tracker = LatencyTracker()
    collector = EventCollector()
    with RunDirectory(cfg.out, cfg.overwrite) as out:
        with JsonLinesSink(out / EVENTS_JSONL) as events_sink:
            pipeline = DetectionPipeline(
                model,
                DetectorConfig(threshold=cfg.detector_threshold),
                subscribers=[events_sink, StopChannelSink(sys.stdout), collector],
                tracker=tracker,
                start_time_s=buffer.start_time_s if buffer is not None else 0.0,
            )
            if buffer is not None:
                pipeline.run(buffer, pace=cfg.pace)
            else:
                tracker.start()
                _read_stdin(pipeline)
                pipeline.finish()
                tracker.stop()
        report = response_budget_check(tracker, SAMPLE_RATE_HZ)
        atomic_write_json(out / LATENCY_JSON, report.to_dict())
        write_snapshot(out, cfg)

    first = collector.first_stop
    log_summary(logger, "Detection", [
        ('Events', len(collector.events)),
        ('Stops', sum(e.stop for e in collector.events)),
        ('First stop', f"{first.time_s:.3f}s" if first else "none"),
        ('Max latency', f"{report.latency_max_ms:.1f} ms"),
    ])
    return EXIT_OK


# report

def cmd_report(cfg: RunConfig) -> int:
    catalog = load_catalog(Path(cfg.catalog) if cfg.catalog else None)
    builders = {'angle': angle_sweep, 'location': location_sweep, 'material': material_sweep}
    tables = {}
    with RunDirectory(cfg.out, cfg.overwrite) as out:
        for name in cfg.sweeps:
            with StageLogger(f"{name} sweep", logger):
                table = micro_benchmark_max_distance(
                    builders[name](catalog), cfg.trials_per_point, cfg.seed, cfg.workers, _progress(cfg)
                )
            write_csv(table, out / f"sweep_{name}.csv")
            write_gnuplot(table, out / f"sweep_{name}.dat", title=f"{name} sweep")
            tables[name] = table

        detection_distance = 0.183
        if 'angle' in tables and len(tables['angle']):
            detection_distance = float(tables['angle']['max_distance_cm'].max()) / 100

        if cfg.model:
            model, _ = load_model(cfg.model)
        else:
            model = create_model(CnnConfig(layers=cfg.cnn_layers, channels=cfg.cnn_channels), seed=cfg.seed)
        channel = ChannelModel(rng_seed=cfg.seed)
        stream = simulate_received(gen_excitation(ExcitationConfig(), REPORT_STREAM_S), channel)
        tracker = LatencyTracker()
        DetectionPipeline(model, tracker=tracker).run(stream, pace=cfg.pace)
        report = response_budget_check(tracker, SAMPLE_RATE_HZ, detection_distance_m=detection_distance)
        atomic_write_json(out / LATENCY_JSON, report.to_dict())

        with StageLogger("stream traces", logger, banner=False) as stage:
            envelope = SampleBuffer(field_envelope(stream), stream.sample_rate_hz, stream.start_time_s)
            export_envelope_csv(envelope, out / ENVELOPE_CSV, decimate=REPORT_ENVELOPE_DECIMATE)
            monitor = detect_proximity(stream)
            export_cusum_csv(monitor, out / CUSUM_CSV)
            if monitor.alarmed:
                stage.log_warning(f"CUSUM alarm at {monitor.alarm_time_s:.3f}s on an obstacle-free stream")
        write_snapshot(out, cfg)

    for name, table in tables.items():
        _print_table(
            f"{name.title()} sweep",
            ['Setting', 'Max distance (cm)', 'Detections'],
            [(r.label, f"{r.max_distance_cm:.1f}", f"{r.detections}/{r.trials}") for r in table.itertuples()],
        )
    _print_table("Response budget", ['Quantity', 'Value'], [
        ('Max event latency', f"{report.latency_max_ms:.1f} ms"),
        ('Budget', f"{report.budget_ms:.0f} ms"),
        ('Real-time factor', f"{report.realtime_factor:.1f}x"),
        ('Detection distance', f"{report.detection_distance_m * 100:.1f} cm"),
        ('v_max', f"{report.v_max_m_s * 100:.1f} cm/s"),
        ('Passed', report.passed),
    ])
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'train': cmd_train,
    'eval': cmd_eval,
    'detect': cmd_detect,
    'report': cmd_report,
}
