"""Event subscribers: JSON lines and the plain-text stop channel."""

import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, TextIO, Union

from .models import DetectionEvent

logger = logging.getLogger(__name__)


class _LineSink:
    def __init__(self, target: Union[Path, str, TextIO, None] = None):
        self._owned = False
        if target is None:
            self.stream = sys.stdout
        elif isinstance(target, (str, Path)):
            path = Path(target)
            path.parent.mkdir(parents=True, exist_ok=True)
            self.stream = open(path, 'w', encoding='utf-8')
            self._owned = True
        else:
            self.stream = target
        self.lines = 0

    def write_line(self, line: str):
        self.stream.write(line + '\n')
        self.stream.flush()
        self.lines += 1

    def close(self):
        if self._owned:
            self.stream.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class JsonLinesSink(_LineSink):
    """One JSON object per event."""

    def __call__(self, event: DetectionEvent):
        self.write_line(json.dumps(event.to_record(), sort_keys=True))


class StopChannelSink(_LineSink):
    """`STOP <time_s>` for the event that engages the detector latch."""

    def __call__(self, event: DetectionEvent):
        if event.triggered:
            self.write_line(f"STOP {event.time_s:.3f}")


class EventCollector:
    """Keeps every event in memory."""

    def __init__(self):
        self.events: List[DetectionEvent] = []

    def __call__(self, event: DetectionEvent):
        self.events.append(event)

    @property
    def first_stop(self) -> Optional[DetectionEvent]:
        return next((e for e in self.events if e.stop), None)
