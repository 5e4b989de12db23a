"""Tests for the key=value config parser and setting resolution."""

import pytest

from scripts.aura import ConfigError, create_parser, parse_config_text, resolve


def test_parses_types():
    values = parse_config_text(
        "# comment\n"
        "\n"
        "scenarios = static_robot_moving_object, negative_only  # two\n"
        "trials = 12\n"
        "speed_range = 0.1..0.4\n"
        "threshold = 0.6\n"
        "pace = yes\n"
    )
    assert values == {
        'scenarios': ('static_robot_moving_object', 'negative_only'),
        'trials': 12,
        'speed_range': (0.1, 0.4),
        'threshold': 0.6,
        'pace': True,
    }


@pytest.mark.parametrize("text, line, message", [
    ("trials = 3\nbogus = 1\n", 2, "unknown key"),
    ("trials = 3\n\ntrials = 4\n", 3, "duplicate"),
    ("seed 7\n", 1, "key = value"),
    ("trials = many\n", 1, "trials"),
    ("speed_range = 0.4..0.1\n", 1, "speed_range"),
    ("scenarios = sideways\n", 1, "scenarios"),
    ("threshold = 1.5\n", 1, "threshold"),
    ("# header\nclassifier =\n", 2, "missing value"),
])
def test_errors_carry_line_numbers(text, line, message):
    with pytest.raises(ConfigError, match=message) as info:
        parse_config_text(text)
    assert info.value.line_number == line


def test_error_message_names_file(tmp_path):
    path = tmp_path / 'bad.cfg'
    path.write_text("trials = 3\nnope = 1\n")
    args = create_parser().parse_args(['simulate', '--config', str(path)])
    with pytest.raises(ConfigError) as info:
        resolve(args)
    assert info.value.path == path
    assert str(info.value).startswith(f"{path}:2:")


def test_flags_override_file(tmp_path, monkeypatch):
    monkeypatch.delenv('AURA_OUTPUT_ROOT', raising=False)
    path = tmp_path / 'run.cfg'
    path.write_text("seed = 3\ntrials = 50\nworkers = 2\n")
    args = create_parser().parse_args(['simulate', '--config', str(path), '--seed', '9', '--out', 'x'])
    cfg = resolve(args)
    assert cfg.seed == 9
    assert cfg.trials == 50
    assert cfg.workers == 2
    assert str(cfg.out) == 'x'


def test_defaults_without_file(monkeypatch):
    monkeypatch.delenv('AURA_OUTPUT_ROOT', raising=False)
    cfg = resolve(create_parser().parse_args(['eval']))
    assert cfg.threshold is None
    assert cfg.detector_threshold == 0.717
    assert cfg.on == 'test'
    assert str(cfg.out) == 'runs/eval'


def test_output_root_env(monkeypatch, tmp_path):
    monkeypatch.setenv('AURA_OUTPUT_ROOT', str(tmp_path))
    cfg = resolve(create_parser().parse_args(['report', '--out', 'sweeps', '--trials', '3']))
    assert cfg.out == tmp_path / 'sweeps'
    assert cfg.trials_per_point == 3
    absolute = resolve(create_parser().parse_args(['report', '--out', str(tmp_path / 'abs')]))
    assert absolute.out == tmp_path / 'abs'


def test_snapshot_is_plain_json():
    cfg = resolve(create_parser().parse_args(['simulate', '--seed', '4']))
    snapshot = cfg.snapshot()
    assert snapshot['seed'] == 4
    assert snapshot['scenarios'] == ['static_robot_moving_object']
    assert 'out' not in snapshot and 'verbose' not in snapshot
