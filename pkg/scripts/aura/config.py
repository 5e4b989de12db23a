"""
Run configuration: key=value files, flag overrides and the resolved settings.

    # static scenario, desk scale
    scenarios = static_robot_moving_object, negative_only
    trials = 200
    speed_range = 0.1..0.4
    seed = 7

Lines are `key = value`; `#` starts a comment; blank lines are ignored.
Lists are comma-separated and ranges are written `min..max`.
Precedence: built-in defaults < config file < command-line flags.
"""

import dataclasses
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from scripts.classifiers.constants import CNN_CHANNELS, CNN_LAYERS, EVAL_EVERY, LEARNING_RATE, MAX_STEPS, PATIENCE
from scripts.detector.constants import THRESHOLD
from scripts.evaluation.constants import DEFAULT_WORKERS, MICRO_TRIALS, SCENARIOS, TRIALS_PER_SCENARIO

from .constants import DEFAULT_OUTPUT_DIR, OUTPUT_ROOT_ENV

logger = logging.getLogger(__name__)

CLASSIFIERS = ('cnn', 'svm')
SPLITS = ('auto', 'object', 'day', 'none')
SWEEPS = ('angle', 'location', 'material')


class ConfigError(ValueError):
    """A config file or flag value that cannot be used."""

    def __init__(self, message: str, line_number: Optional[int] = None, path: Optional[Path] = None):
        self.line_number = line_number
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:{line_number}: " if line_number else f"{path}: "
        elif line_number:
            where = f"line {line_number}: "
        super().__init__(where + message)


class UsageError(Exception):
    """A valid config asked for something the inputs cannot provide."""


# Value parsers

def _int(minimum: Optional[int] = None) -> Callable[[str], int]:
    def parse(text: str) -> int:
        value = int(text)
        if minimum is not None and value < minimum:
            raise ValueError(f"must be >= {minimum}")
        return value
    return parse


def _float(low: Optional[float] = None, high: Optional[float] = None, positive: bool = False) -> Callable[[str], float]:
    def parse(text: str) -> float:
        value = float(text)
        if positive and value <= 0:
            raise ValueError("must be positive")
        if low is not None and value < low or high is not None and value > high:
            raise ValueError(f"must lie in [{low}, {high}]")
        return value
    return parse


def _choice(options: Tuple[str, ...]) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _list(item: Callable[[str], Any]) -> Callable[[str], Tuple]:
    def parse(text: str) -> Tuple:
        items = [part.strip() for part in text.split(',')]
        if not all(items):
            raise ValueError("empty list item")
        return tuple(item(part) for part in items)
    return parse


def _range(text: str) -> Tuple[float, float]:
    if '..' not in text:
        raise ValueError("expected a range min..max")
    low, high = (float(part) for part in text.split('..', 1))
    if not 0 < low <= high:
        raise ValueError("range must be positive and ordered")
    return (low, high)


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ('true', 'yes', '1', 'on'):
        return True
    if lowered in ('false', 'no', '0', 'off'):
        return False
    raise ValueError("expected true or false")


KEYS: Dict[str, Callable[[str], Any]] = {
    'scenarios': _list(_choice(SCENARIOS)),
    'trials': _int(1),
    'negatives': _int(0),
    'seed': _int(0),
    'objects': _list(str),
    'speed_range': _range,
    'classifier': _choice(CLASSIFIERS),
    'threshold': _float(0.0, 1.0),
    'split': _choice(SPLITS),
    'max_steps': _int(1),
    'learning_rate': _float(positive=True),
    'eval_every': _int(1),
    'patience': _int(0),
    'cnn_layers': _int(1),
    'cnn_channels': _int(1),
    'trials_per_point': _int(1),
    'sweeps': _list(_choice(SWEEPS)),
    'workers': _int(1),
    'catalog': str,
    'pace': _bool,
    'out': str,
}


def parse_config_text(text: str, path: Optional[Path] = None) -> Dict[str, Any]:
    """Parse key=value lines into typed values; errors carry the 1-based line number."""
    values: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"expected key = value, got '{raw.strip()}'", number, path)
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key '{key}'", number, path)
        if key in values:
            raise ConfigError(f"duplicate key '{key}'", number, path)
        if not value:
            raise ConfigError(f"missing value for '{key}'", number, path)
        try:
            values[key] = KEYS[key](value)
        except ValueError as e:
            raise ConfigError(f"bad value for '{key}': {e}", number, path) from e
    return values


def load_config(path: Path) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError("config file not found", path=path)
    return parse_config_text(path.read_text(encoding='utf-8'), path)


@dataclass
class RunConfig:
    """Everything one subcommand run needs, after defaults, file and flags are merged."""

    subcommand: str
    config_path: Optional[Path] = None
    out: Path = DEFAULT_OUTPUT_DIR
    seed: int = 0
    verbose: bool = False
    quiet: bool = False
    pace: bool = False
    overwrite: bool = False
    # simulate
    scenarios: Tuple[str, ...] = ('static_robot_moving_object',)
    trials: int = TRIALS_PER_SCENARIO
    negatives: Optional[int] = None
    objects: Tuple[str, ...] = ()
    speed_range: Optional[Tuple[float, float]] = None
    catalog: Optional[str] = None
    workers: int = DEFAULT_WORKERS
    stream: Optional[str] = None
    # train / eval
    dataset: Optional[Path] = None
    model: Optional[Path] = None
    classifier: str = 'cnn'
    split: str = 'auto'
    max_steps: int = MAX_STEPS
    learning_rate: float = LEARNING_RATE
    eval_every: int = EVAL_EVERY
    patience: int = PATIENCE
    cnn_layers: int = CNN_LAYERS
    cnn_channels: int = CNN_CHANNELS
    threshold: Optional[float] = None
    on: str = 'test'
    allow_train_eval: bool = False
    allow_mismatch: bool = False
    # detect / report
    input: Optional[str] = None
    trials_per_point: int = MICRO_TRIALS
    sweeps: Tuple[str, ...] = SWEEPS

    @property
    def detector_threshold(self) -> float:
        return THRESHOLD if self.threshold is None else self.threshold

    def snapshot(self) -> Dict[str, Any]:
        """JSON-ready settings; paths as strings, nothing machine-specific."""
        data = dataclasses.asdict(self)
        for key in ('verbose', 'quiet', 'overwrite', 'out'):
            data.pop(key)
        for key, value in data.items():
            if isinstance(value, Path):
                data[key] = str(value)
            elif isinstance(value, tuple):
                data[key] = list(value)
        return data


# Flags that override config keys of the same name when given
FLAG_KEYS = ('seed', 'threshold', 'classifier', 'trials')


def output_dir(out: Path) -> Path:
    """Relative output directories live under $AURA_OUTPUT_ROOT when it is set."""
    out = Path(out)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not out.is_absolute():
        return Path(root) / out
    return out


def resolve(args) -> RunConfig:
    """Merge defaults, the optional config file and the parsed flags."""
    file_values: Dict[str, Any] = {}
    config_path = Path(args.config) if getattr(args, 'config', None) else None
    if config_path is not None:
        file_values = load_config(config_path)

    settings: Dict[str, Any] = {}
    for key, value in file_values.items():
        settings[key] = value
    if 'out' in settings:
        settings['out'] = Path(settings['out'])

    for key in FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    for key in ('pace', 'overwrite', 'allow_train_eval', 'allow_mismatch', 'verbose', 'quiet'):
        if getattr(args, key, False):
            settings[key] = True
    for key in ('dataset', 'model'):
        if getattr(args, key, None):
            settings[key] = Path(getattr(args, key))
    for key in ('input', 'stream', 'on'):
        if getattr(args, key, None):
            settings[key] = getattr(args, key)
    if getattr(args, 'out', None):
        settings['out'] = Path(args.out)
    # --trials means trials per sweep point for report
    if args.subcommand == 'report' and getattr(args, 'trials', None) is not None:
        settings['trials_per_point'] = settings.pop('trials')

    settings.setdefault('out', DEFAULT_OUTPUT_DIR / args.subcommand)
    settings['out'] = output_dir(settings['out'])
    return RunConfig(subcommand=args.subcommand, config_path=config_path, **settings)
