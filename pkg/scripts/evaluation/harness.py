"""Seeded, parallel trial execution."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Sequence, TypeVar

import numpy as np
from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def trial_seeds(master_seed: int, count: int) -> List[np.random.SeedSequence]:
    """Independent per-trial seed sequences; trial k always gets child k."""
    return np.random.SeedSequence(master_seed).spawn(count)


def child_seed(seed: np.random.SeedSequence) -> int:
    """A plain integer seed drawn from a seed sequence."""
    return int(seed.generate_state(1)[0])


def run_parallel(
    fn: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    desc: str = "Trials",
    progress: bool = True,
) -> List[R]:
    """
    Apply fn to every item, on a thread pool when workers > 1.

    Results come back in item order whatever order the threads finish in.
    The first failure is re-raised once all submitted work has settled.
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in tqdm(items, desc=desc, ncols=80, disable=not progress)]

    results = {}
    errors = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(fn, item): i for i, item in enumerate(items)}
        with tqdm(total=len(items), desc=desc, ncols=80, disable=not progress) as pbar:
            for future in as_completed(futures):
                index = futures[future]
                try:
                    results[index] = future.result()
                except Exception as e:
                    logger.error(f"Trial {index} failed: {e}")
                    errors.append(e)
                pbar.update(1)
    if errors:
        raise errors[0]
    return [results[i] for i in range(len(items))]
