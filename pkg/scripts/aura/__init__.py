"""
Command-line entry point: simulate, train, eval, detect and report.

Usage:
    python -m scripts.aura simulate --config data/scenarios/static.cfg --seed 7 --out runs/static
    python -m scripts.aura --help
"""

from .cli import create_parser, main
from .config import ConfigError, RunConfig, UsageError, load_config, parse_config_text, resolve
from .constants import VERSION

__all__ = [
    'ConfigError',
    'RunConfig',
    'UsageError',
    'VERSION',
    'create_parser',
    'load_config',
    'main',
    'parse_config_text',
    'resolve',
]
