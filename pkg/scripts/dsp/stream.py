"""Threaded stage chain linked by bounded FIFOs."""

import logging
import queue
import threading
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from .constants import FIFO_DEPTH

logger = logging.getLogger(__name__)

Stage = Callable[[np.ndarray], Optional[np.ndarray]]

_DONE = None


class StreamPipeline:
    """
    Runs each stage in its own thread.

    Stage i reads chunks from FIFO i and writes its result into FIFO i+1.
    put() blocks when a FIFO is full, so nothing is dropped. A None chunk
    terminates the chain; a stage may also return None to emit nothing.
    `flushers` (one per stage, optional) are called once at end of stream
    and their output travels on like a normal chunk.
    """

    def __init__(
        self,
        stages: Sequence[Stage],
        sink: Callable[[np.ndarray], None],
        flushers: Optional[Sequence[Optional[Callable[[], Optional[np.ndarray]]]]] = None,
        depth: int = FIFO_DEPTH,
    ):
        if not stages:
            raise ValueError("pipeline needs at least one stage")
        if depth < 1:
            raise ValueError(f"FIFO depth must be >= 1, got {depth}")
        self.stages = list(stages)
        self.flushers = list(flushers) if flushers is not None else [None] * len(self.stages)
        if len(self.flushers) != len(self.stages):
            raise ValueError("need one flusher slot per stage")
        self.sink = sink
        self.fifos: List[queue.Queue] = [queue.Queue(maxsize=depth) for _ in range(len(self.stages) + 1)]
        self.errors: List[BaseException] = []

    def _run_stage(self, i: int):
        stage, inbox, outbox = self.stages[i], self.fifos[i], self.fifos[i + 1]
        failed = False
        while True:
            chunk = inbox.get()
            if chunk is _DONE:
                break
            if failed:
                continue
            try:
                out = stage(chunk)
            except Exception as e:
                logger.error(f"Stage {i} failed: {e}")
                self.errors.append(e)
                failed = True
                continue
            if out is not None and len(out):
                outbox.put(out)
        if not failed and self.flushers[i] is not None:
            try:
                tail = self.flushers[i]()
                if tail is not None and len(tail):
                    outbox.put(tail)
            except Exception as e:
                self.errors.append(e)
        outbox.put(_DONE)

    def _run_sink(self):
        inbox = self.fifos[-1]
        while True:
            chunk = inbox.get()
            if chunk is _DONE:
                break
            try:
                self.sink(chunk)
            except Exception as e:
                if not self.errors:
                    logger.error(f"Sink failed: {e}")
                self.errors.append(e)

    def run(self, chunks: Iterable[np.ndarray]):
        """Feed every chunk, wait for the chain to drain, re-raise the first stage error."""
        threads = [
            threading.Thread(target=self._run_stage, args=(i,), name=f"stage-{i}", daemon=True)
            for i in range(len(self.stages))
        ]
        threads.append(threading.Thread(target=self._run_sink, name="sink", daemon=True))
        for t in threads:
            t.start()
        for chunk in chunks:
            self.fifos[0].put(np.asarray(chunk, dtype=float))
        self.fifos[0].put(_DONE)
        for t in threads:
            t.join()
        if self.errors:
            raise self.errors[0]
