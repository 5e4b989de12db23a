"""Output directories that only appear once a run has finished."""

import logging
import os
import shutil
from pathlib import Path
from typing import Optional

from scripts.common import atomic_write_json

from .config import RunConfig, UsageError
from .constants import SNAPSHOT_NAME, VERSION

logger = logging.getLogger(__name__)


class RunDirectory:
    """
    Build outputs in `<out>.tmp-<pid>` and rename to `<out>` on success.

    A non-empty `<out>` is only replaced with overwrite=True. A failed run
    leaves no partial directory behind.
    """

    def __init__(self, out: Path, overwrite: bool = False):
        self.out = Path(out)
        self.overwrite = overwrite
        self.temp = self.out.with_name(f"{self.out.name}.tmp-{os.getpid()}")
        self.path: Optional[Path] = None

    def __enter__(self) -> Path:
        if self.out.exists() and (not self.out.is_dir() or any(self.out.iterdir())) and not self.overwrite:
            raise UsageError(f"output directory {self.out} is not empty; pass --overwrite to replace it")
        if self.temp.exists():
            shutil.rmtree(self.temp)
        self.temp.mkdir(parents=True)
        self.path = self.temp
        return self.temp

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is not None:
            shutil.rmtree(self.temp, ignore_errors=True)
            return False
        if self.out.exists():
            if self.out.is_dir():
                shutil.rmtree(self.out)
            else:
                self.out.unlink()
        self.temp.rename(self.out)
        logger.info(f"Outputs in {self.out}")
        return False


def write_snapshot(directory: Path, cfg: RunConfig) -> Path:
    """Resolved settings of the run, enough to repeat it."""
    snapshot = {
        'subcommand': cfg.subcommand,
        'version': VERSION,
        'seed': cfg.seed,
        'config': cfg.snapshot(),
    }
    return atomic_write_json(Path(directory) / SNAPSHOT_NAME, snapshot)
