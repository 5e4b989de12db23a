"""Logging setup and stage banners for long runs."""

import logging
import sys
import time
from typing import Iterable, List, Optional, Tuple


class StageLogger:
    """Context manager that brackets one stage (trial, sweep point, training run)."""

    def __init__(self, stage_name: str, logger: logging.Logger, banner: bool = True):
        self.stage_name = stage_name
        self.logger = logger
        self.banner = banner
        self.warnings: List[str] = []
        self.details: List[Tuple[str, str]] = []
        self.started = 0.0
        self.elapsed_s = 0.0

    def __enter__(self):
        self.started = time.perf_counter()
        if self.banner:
            self.logger.info('=' * 60)
            self.logger.info(f"Stage: {self.stage_name}")
            self.logger.info('=' * 60)
        else:
            self.logger.debug(f"Stage: {self.stage_name}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.elapsed_s = time.perf_counter() - self.started
        if exc_type is None:
            self.logger.info(f"✓ {self.stage_name} finished in {format_time(self.elapsed_s)}")
            for key, value in self.details:
                self.logger.info(f"  {key}: {value}")
            for warning in self.warnings:
                self.logger.warning(f"  {warning}")
        else:
            self.logger.error(f"✗ {self.stage_name} failed after {format_time(self.elapsed_s)}: {exc_val}")
        return False

    def log_warning(self, message: str):
        self.warnings.append(message)
        self.logger.warning(f"  ⚠ {message}")

    def add_detail(self, key: str, value):
        self.details.append((key, str(value)))


def format_time(seconds: float) -> str:
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, secs = divmod(seconds, 60)
    if minutes < 60:
        return f"{int(minutes)}m {secs:.0f}s"
    hours, minutes = divmod(minutes, 60)
    return f"{int(hours)}h {int(minutes)}m"


def setup_logging(verbose: bool = False, quiet: bool = False) -> logging.Logger:
    """
    Configure the root logger for command-line runs.

    Args:
        verbose: Show DEBUG messages
        quiet: Only show warnings and errors

    Returns:
        The root logger
    """
    root = logging.getLogger()
    root.handlers.clear()

    handler = logging.StreamHandler(sys.stderr)
    level = logging.DEBUG if verbose else (logging.WARNING if quiet else logging.INFO)
    root.setLevel(level)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%H:%M:%S'
    ))
    root.addHandler(handler)
    return root


def log_summary(logger: logging.Logger, title: str, rows: Iterable[Tuple[str, object]]):
    """Log a banner block of key/value lines."""
    logger.info("")
    logger.info("=" * 60)
    logger.info(title.upper())
    logger.info("=" * 60)
    for key, value in rows:
        logger.info(f"{key}: {value}")
    logger.info("=" * 60)
