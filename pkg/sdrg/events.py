"""
Decimation events emitted by the renormalization engine, and their ASCII log format.

Log lines:
    S pos_a pos_b
    T pos_left pos_mid pos_right surviving_position
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Singlet:
    pos_a: int
    pos_b: int


@dataclass(frozen=True, slots=True)
class TrioMerge:
    pos_left: int
    pos_mid: int
    pos_right: int
    surviving_position: int


DecimationEvent = Union[Singlet, TrioMerge]


@dataclass(frozen=True)
class RunStatistics:
    """Counts derived from one configuration's event sequence."""

    n_sites: int
    singlets: int
    trios: int

    @property
    def residual_sites(self) -> int:
        return self.n_sites - 2 * (self.singlets + self.trios)

    @property
    def trio_fraction(self) -> float:
        total = self.singlets + self.trios
        return self.trios / total if total else 0.0


def run_statistics(events: Sequence[DecimationEvent], n_sites: int) -> RunStatistics:
    trios = sum(1 for event in events if isinstance(event, TrioMerge))
    return RunStatistics(n_sites=n_sites, singlets=len(events) - trios, trios=trios)


def singlet_pairs(events: Iterable[DecimationEvent]) -> np.ndarray:
    """(k, 2) integer array with the representative positions of every singlet."""
    pairs = [(event.pos_a, event.pos_b) for event in events if isinstance(event, Singlet)]
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    return np.asarray(pairs, dtype=np.int64)


def format_event(event: DecimationEvent) -> str:
    if isinstance(event, Singlet):
        return f"S {event.pos_a} {event.pos_b}"
    return f"T {event.pos_left} {event.pos_mid} {event.pos_right} {event.surviving_position}"


def parse_event(line: str) -> DecimationEvent:
    fields = line.split()
    if not fields:
        raise ValueError("Empty event line")
    tag, values = fields[0], [int(value) for value in fields[1:]]
    if tag == 'S' and len(values) == 2:
        return Singlet(*values)
    if tag == 'T' and len(values) == 4:
        return TrioMerge(*values)
    raise ValueError(f"Malformed event line: '{line.strip()}'")


def write_event_log(events: Iterable[DecimationEvent], path) -> Path:
    path = Path(path)
    with open(path, 'w', encoding='ascii') as handle:
        for event in events:
            handle.write(format_event(event) + "\n")
    logger.debug(f"Event log written to {path}")
    return path


def read_event_log(path) -> List[DecimationEvent]:
    with open(path, 'r', encoding='ascii') as handle:
        return [parse_event(line) for line in handle if line.strip()]
