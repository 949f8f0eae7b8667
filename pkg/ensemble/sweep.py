"""
Collate per-model fits into q_ext versus c_eff and fit the linear law.
"""

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import pandas as pd

from scaling.analysis import read_fit_json
from scaling.fitting import FitError, fit_linear_law
from sdrg.model_kind import ModelKind

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['c_eff', 'q_ext', 'delta_q_ext', 'model']
FIT_JSON = 'fit.json'


@dataclass
class SweepResult:
    frame: pd.DataFrame
    k: float
    k_stderr: float
    # (label_a, label_b, |difference|, combined error) for models sharing a spin
    same_spin_pairs: List[Tuple[str, str, float, float]] = field(default_factory=list)

    def summary(self) -> str:
        return f"k = {self.k:.4f} ± {self.k_stderr:.4f} over {len(self.frame)} models"


def _fit_path(path) -> Path:
    path = Path(path)
    if path.is_dir():
        path = path / FIT_JSON
    if not path.exists():
        raise FileNotFoundError(f"No fit.json found at {path}")
    return path


def collect_fits(paths: Sequence) -> pd.DataFrame:
    """One row per fit.json (a file path or a run directory holding one)."""
    rows = []
    for path in paths:
        fit = read_fit_json(_fit_path(path))
        label = ModelKind.from_name(fit['model'], fit['two_s']).label
        rows.append({
            'c_eff': float(fit['c_eff']),
            'q_ext': float(fit['q_ext']),
            'delta_q_ext': float(fit['delta_q_ext']),
            'model': label,
            'two_s': int(fit['two_s']),
        })
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS + ['two_s'])


def sweep(paths: Sequence, out_path) -> SweepResult:
    """
    Write qext_vs_ceff.csv and fit q_ext = 1 - k / c_eff.

    Raises:
        FitError: with fewer than 2 models
    """
    frame = collect_fits(paths)
    if frame['model'].nunique() < 2:
        raise FitError(f"Linear-law fit needs at least 2 distinct models, got {frame['model'].nunique()}")

    frame = frame.sort_values(['c_eff', 'model']).reset_index(drop=True)
    k, k_stderr = fit_linear_law(frame['c_eff'], frame['q_ext'], frame['delta_q_ext'])

    pairs = []
    for _, group in frame.groupby('two_s'):
        for (_, a), (_, b) in itertools.combinations(group.iterrows(), 2):
            pairs.append((a['model'], b['model'], abs(a['q_ext'] - b['q_ext']),
                          a['delta_q_ext'] + b['delta_q_ext']))

    frame = frame[SWEEP_COLUMNS]
    frame.to_csv(out_path, index=False, float_format='%.12g')
    result = SweepResult(frame=frame, k=k, k_stderr=k_stderr, same_spin_pairs=pairs)
    logger.info(f"Sweep written to {out_path}: {result.summary()}")
    for label_a, label_b, difference, combined in pairs:
        logger.info(f"{label_a} vs {label_b}: |dq_ext| = {difference:.4f}, combined error {combined:.4f}")
    return result
