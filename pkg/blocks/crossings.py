"""
Singlet-crossing counts n for a ladder of block sizes.

A singlet crosses the block [anchor, anchor + L) (indices mod N) when exactly
one of its two representative positions lies inside. Trio merges never count.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from sdrg.events import DecimationEvent, singlet_pairs

logger = logging.getLogger(__name__)


class CrossingError(ValueError):
    """Raised for malformed ladders or events that do not belong to the chain."""


@dataclass(frozen=True)
class BlockLadder:
    sizes: Tuple[int, ...]
    n_sites: int
    anchor: int = 0

    def __post_init__(self):
        sizes = tuple(int(size) for size in self.sizes)
        object.__setattr__(self, 'sizes', sizes)
        if not sizes:
            raise CrossingError("Block ladder is empty")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise CrossingError(f"Block sizes must be strictly increasing: {sizes}")
        if sizes[0] < 1 or sizes[-1] >= self.n_sites:
            raise CrossingError(f"Block sizes must lie in [1, {self.n_sites}), got {sizes}")
        if not 0 <= self.anchor < self.n_sites:
            raise CrossingError(f"Anchor {self.anchor} outside [0, {self.n_sites})")

    @classmethod
    def auto(cls, n_sites: int, l_min: int = 8, anchor: int = 0) -> "BlockLadder":
        """Powers of two from l_min up to N/8."""
        sizes = []
        size = l_min
        while size <= n_sites // 8:
            sizes.append(size)
            size *= 2
        return cls(tuple(sizes), n_sites, anchor)

    def anchors(self, count: int) -> Tuple[int, ...]:
        """`count` equally spaced anchors starting at the ladder's own anchor."""
        if count < 1:
            raise CrossingError(f"Anchor count must be positive, got {count}")
        if count > self.n_sites:
            raise CrossingError(f"At most {self.n_sites} distinct anchors, got {count}")
        return tuple((self.anchor + k * self.n_sites // count) % self.n_sites for k in range(count))


@dataclass
class CrossingTable:
    """Per-configuration counts; counts[k, i] is n for anchor k and block sizes[i]."""

    sizes: Tuple[int, ...]
    counts: np.ndarray
    anchors: Tuple[int, ...] = field(default=(0,))

    def for_anchor(self, k: int = 0) -> np.ndarray:
        return self.counts[k]


def _arc_cover(starts: np.ndarray, lengths: np.ndarray, n_sites: int) -> np.ndarray:
    """How many of the arcs [start, start + length) (mod N) cover each site."""
    keep = lengths > 0
    starts = starts[keep]
    ends = starts + lengths[keep]
    wraps = ends > n_sites
    diff = np.bincount(starts, minlength=n_sites + 1)
    diff -= np.bincount(np.where(wraps, n_sites, ends), minlength=n_sites + 1)
    diff[0] += np.count_nonzero(wraps)
    diff -= np.bincount(ends[wraps] - n_sites, minlength=n_sites + 1)
    return np.cumsum(diff[:n_sites])


def crossing_profile(pairs: np.ndarray, sizes: Sequence[int], n_sites: int) -> np.ndarray:
    """
    Crossing counts for every anchor at once; profile[i, x] is n for the block
    [x, x + sizes[i]).

    Site p lies in the block at x for x in the arc [p - L + 1, p]. A singlet
    crosses when exactly one endpoint is inside, so n(x) is the number of
    covering endpoint arcs minus twice the number of pairs with both inside.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    a, b = pairs[:, 0], pairs[:, 1]
    endpoints = pairs.ravel()
    d = (b - a) % n_sites
    profile = np.empty((len(sizes), n_sites), dtype=np.int64)
    for i, size in enumerate(sizes):
        lengths = np.full(endpoints.size, size, dtype=np.int64)
        n = _arc_cover((endpoints - size + 1) % n_sites, lengths, n_sites)
        # both endpoints inside, reached going right from a, then going right from b
        n -= 2 * _arc_cover((b - size + 1) % n_sites, np.maximum(size - d, 0), n_sites)
        n -= 2 * _arc_cover((a - size + 1) % n_sites, np.maximum(size - (n_sites - d), 0), n_sites)
        profile[i] = n
    return profile


def count_crossings(events: Iterable[DecimationEvent],
                    ladder: BlockLadder,
                    n_anchors: int = 1,
                    pairs: Optional[np.ndarray] = None) -> CrossingTable:
    """
    Count singlets crossing each block of the ladder.

    Args:
        events: Completed event sequence of an N-site chain
        ladder: Block sizes and anchor
        n_anchors: Number of equally spaced anchors to evaluate
        pairs: Precomputed singlet positions, skips the event scan

    Returns:
        CrossingTable with one row per anchor
    """
    if pairs is None:
        pairs = singlet_pairs(events)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= ladder.n_sites):
        raise CrossingError(f"Singlet positions outside [0, {ladder.n_sites})")

    anchors = ladder.anchors(n_anchors)
    profile = crossing_profile(pairs, ladder.sizes, ladder.n_sites)
    counts = np.ascontiguousarray(profile[:, list(anchors)].T)
    return CrossingTable(sizes=ladder.sizes, counts=counts, anchors=anchors)
