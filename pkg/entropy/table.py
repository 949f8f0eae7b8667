"""
Ensemble statistics of S_q per (q, L).

Each configuration contributes one sample per (q, L): the entropy of its
crossing count, averaged over anchors when several are evaluated. Running
means and second moments follow Welford's update; partial tables merge with
the pairwise (Chan) formula, so disjoint subsets reduce to the table of their
union.
"""

import logging
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from blocks.crossings import CrossingTable
from .tsallis import EntropyOverflowError, tsallis_entropy_of_counts

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['q', 'L', 'mean', 'stderr', 'M']
CSV_FLOAT_FORMAT = '%.12g'


class LadderMismatchError(ValueError):
    """Raised when counts or tables do not share the same q grid and block sizes."""


class EntropyTable:

    def __init__(self, q_values: Sequence[float], sizes: Sequence[int], two_s: int):
        self.q_values = tuple(float(q) for q in q_values)
        self.sizes = tuple(int(size) for size in sizes)
        self.two_s = int(two_s)
        shape = (len(self.q_values), len(self.sizes))
        self.count = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def _check_compatible(self, other: "EntropyTable"):
        if (self.q_values, self.sizes, self.two_s) != (other.q_values, other.sizes, other.two_s):
            raise LadderMismatchError("Entropy tables have different q grids, block sizes or spins")

    def sample_entropies(self, counts: CrossingTable) -> np.ndarray:
        """(q, L) entropies of one configuration, averaged over its anchors."""
        if tuple(counts.sizes) != self.sizes:
            raise LadderMismatchError(
                f"Crossing table ladder {tuple(counts.sizes)} does not match {self.sizes}"
            )
        rows = []
        for q in self.q_values:
            try:
                rows.append(tsallis_entropy_of_counts(counts.counts, q, self.two_s).mean(axis=0))
            except EntropyOverflowError as exc:
                column = int(np.argmax(counts.counts.max(axis=0)))
                raise EntropyOverflowError(exc.n, q, self.two_s, self.sizes[column]) from exc
        return np.stack(rows)

    def accumulate(self, counts: CrossingTable) -> "EntropyTable":
        sample = self.sample_entropies(counts)
        self.count += 1
        delta = sample - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (sample - self.mean)
        return self

    def merge(self, other: "EntropyTable") -> "EntropyTable":
        """Combine two tables built from disjoint configuration subsets."""
        self._check_compatible(other)
        merged = EntropyTable(self.q_values, self.sizes, self.two_s)
        total = self.count + other.count
        if total == 0:
            return merged
        delta = other.mean - self.mean
        merged.count = total
        merged.mean = self.mean + delta * (other.count / total)
        merged.m2 = self.m2 + other.m2 + delta ** 2 * (self.count * other.count / total)
        return merged

    @property
    def variance(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.variance / self.count)

    def to_dataframe(self) -> pd.DataFrame:
        q_grid, l_grid = np.meshgrid(self.q_values, self.sizes, indexing='ij')
        return pd.DataFrame({
            'q': q_grid.ravel(),
            'L': l_grid.ravel().astype(int),
            'mean': self.mean.ravel(),
            'stderr': self.stderr.ravel(),
            'M': self.count,
        }, columns=CSV_COLUMNS)

    def write_csv(self, path) -> Path:
        path = Path(path)
        self.to_dataframe().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        logger.info(f"Entropy table ({self.count} configurations) written to {path}")
        return path

    def state(self) -> dict:
        """Arrays needed to resume accumulation exactly."""
        return {
            'q_values': np.asarray(self.q_values),
            'sizes': np.asarray(self.sizes),
            'two_s': np.asarray(self.two_s),
            'count': np.asarray(self.count),
            'mean': self.mean,
            'm2': self.m2,
        }

    @classmethod
    def from_state(cls, state) -> "EntropyTable":
        table = cls(state['q_values'].tolist(), state['sizes'].tolist(), int(state['two_s']))
        table.count = int(state['count'])
        table.mean = np.array(state['mean'], dtype=float)
        table.m2 = np.array(state['m2'], dtype=float)
        return table


def read_entropy_csv(path) -> pd.DataFrame:
    """Load an entropy.csv produced by simulate, validating its schema."""
    frame = pd.read_csv(path)
    missing = [column for column in CSV_COLUMNS if column not in frame.columns]
    if missing:
        raise ValueError(f"{path} is missing columns {missing}")
    if frame.empty:
        raise ValueError(f"{path} contains no rows")
    return frame.sort_values(['q', 'L']).reset_index(drop=True)
