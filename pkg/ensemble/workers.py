"""
Per-configuration work executed inside the joblib pool.

Kept free of Django imports so loky workers can unpickle tasks without an
initialized app registry. Workers return integer crossing counts only; the
coordinator turns them into entropies in configuration order.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from blocks.crossings import BlockLadder, count_crossings
from disorder.sampling import DisorderSpec, sample_couplings
from sdrg.engine import run_configuration
from sdrg.events import run_statistics, singlet_pairs, write_event_log
from sdrg.model_kind import ModelKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WorkerTask:
    """A contiguous range [start, stop) of configuration indices."""

    model: ModelKind
    disorder: DisorderSpec
    ladder: BlockLadder
    start: int
    stop: int
    n_anchors: int = 1
    kappa_left: float = 1.0
    kappa_right: float = 1.0
    debug: bool = False
    event_dir: Optional[str] = None
    dump_events_below: int = 0

    @property
    def n_sites(self) -> int:
        return self.ladder.n_sites


@dataclass
class BatchResult:
    start: int
    # shape (configurations, anchors, block sizes)
    counts: np.ndarray
    singlets: np.ndarray
    trios: np.ndarray

    @property
    def stop(self) -> int:
        return self.start + len(self.counts)


def run_single(task: WorkerTask, config_index: int) -> Tuple[np.ndarray, int, int]:
    couplings = sample_couplings(task.disorder, task.n_sites, config_index)
    events = run_configuration(
        task.model,
        couplings,
        task.n_sites,
        kappa_left=task.kappa_left,
        kappa_right=task.kappa_right,
        debug=task.debug,
    )
    if task.event_dir is not None and config_index < task.dump_events_below:
        write_event_log(events, Path(task.event_dir) / f"config_{config_index:06d}.log")
    stats = run_statistics(events, task.n_sites)
    table = count_crossings(events, task.ladder, task.n_anchors, pairs=singlet_pairs(events))
    return table.counts, stats.singlets, stats.trios


def run_batch(task: WorkerTask) -> BatchResult:
    """Decimate every configuration of the task's index range."""
    size = task.stop - task.start
    counts = np.zeros((size, task.n_anchors, len(task.ladder.sizes)), dtype=np.int64)
    singlets = np.zeros(size, dtype=np.int64)
    trios = np.zeros(size, dtype=np.int64)
    for offset, index in enumerate(range(task.start, task.stop)):
        counts[offset], singlets[offset], trios[offset] = run_single(task, index)
    return BatchResult(start=task.start, counts=counts, singlets=singlets, trios=trios)


def split_range(start: int, stop: int, parts: int) -> Tuple[Tuple[int, int], ...]:
    """Split [start, stop) into at most `parts` contiguous, nonempty ranges."""
    total = stop - start
    parts = max(1, min(parts, total))
    edges = [start + (total * k) // parts for k in range(parts + 1)]
    return tuple((lo, hi) for lo, hi in zip(edges, edges[1:]) if hi > lo)
