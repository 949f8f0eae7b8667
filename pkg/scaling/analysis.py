import json
import logging
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from .fitting import (
    FitError,
    c_eff_of_spin,
    delta_gamma,
    fit_gamma_quadratic,
    fit_log_slope,
    fit_power_law,
    q_ext_linear,
    q_ext_pure,
    solve_q_ext,
)

logger = logging.getLogger(__name__)

VON_NEUMANN_Q_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GammaPoint:
    q: float
    gamma: float
    stderr: float


@dataclass
class ScalingFit:
    model: str
    two_s: int
    gamma_points: List[GammaPoint]
    u: float
    v: float
    w: float
    chi2_reduced: float
    q_ext: float
    delta_q_ext: float
    c_eff: float
    q_ext_linear_pred: float
    q_ext_pure_pred: float
    trio_fraction: Optional[float] = None
    von_neumann_slope: Optional[float] = None
    von_neumann_slope_stderr: Optional[float] = None
    covariance: List[List[float]] = field(default_factory=list)

    @property
    def c_eff_measured(self) -> Optional[float]:
        if self.von_neumann_slope is None:
            return None
        return 3.0 * self.von_neumann_slope

    def to_json_dict(self) -> dict:
        payload = asdict(self)
        payload['gamma_points'] = [asdict(point) for point in self.gamma_points]
        payload['c_eff_measured'] = self.c_eff_measured
        return payload

    def summary(self) -> str:
        return (
            f"q_ext = {self.q_ext:.4f} ± {self.delta_q_ext:.4f} "
            f"(c_eff = {self.c_eff:.4f}, linear-pred = {self.q_ext_linear_pred:.4f})"
        )


def gamma_points(frame: pd.DataFrame, window: Optional[Tuple[float, float]] = None) -> List[GammaPoint]:
    """Power-law exponent for every q of the table except the von Neumann point."""
    points = []
    for q, rows in frame.groupby('q', sort=True):
        if abs(q - 1.0) < VON_NEUMANN_Q_TOLERANCE:
            continue
        rows = rows.sort_values('L')
        fit = fit_power_law(rows['L'].to_numpy(), rows['mean'].to_numpy(), rows['stderr'].to_numpy(), window)
        points.append(GammaPoint(q=float(q), gamma=fit.gamma, stderr=fit.gamma_stderr))
    return points


def analyze_table(frame: pd.DataFrame,
                  model: str,
                  two_s: int,
                  window: Optional[Tuple[float, float]] = None,
                  weighted: bool = True,
                  dgamma_policy: str = 'median',
                  trio_fraction: Optional[float] = None) -> ScalingFit:
    """
    Fit gamma(q), solve for q_ext and compare with the closed-form predictions.

    Args:
        frame: Rows of entropy.csv (q, L, mean, stderr, M)
        model: 'heisenberg' or 'biquadratic'
        two_s: Twice the spin
        window: Inclusive L window for the power-law fits
        weighted: Weight the quadratic fit by 1 / stderr^2
        dgamma_policy: 'median' or 'max' over per-q gamma stderrs
        trio_fraction: Carried through from the simulation metadata
    """
    points = gamma_points(frame, window)
    if len(points) < 5:
        raise FitError(f"{len(points)} q values available besides q = 1; at least 5 are needed")

    q = np.array([point.q for point in points])
    gamma = np.array([point.gamma for point in points])
    stderr = np.array([point.stderr for point in points])

    quadratic = fit_gamma_quadratic(q, gamma, stderr, weighted=weighted)
    dgamma = delta_gamma(stderr, dgamma_policy)
    q_ext, delta_q_ext = solve_q_ext(quadratic.u, quadratic.v, quadratic.w, (q.min(), q.max()), dgamma)

    c_eff = c_eff_of_spin(two_s)
    fit = ScalingFit(
        model=model,
        two_s=int(two_s),
        gamma_points=points,
        u=quadratic.u,
        v=quadratic.v,
        w=quadratic.w,
        chi2_reduced=quadratic.chi2_reduced,
        q_ext=q_ext,
        delta_q_ext=delta_q_ext,
        c_eff=c_eff,
        q_ext_linear_pred=q_ext_linear(c_eff),
        q_ext_pure_pred=q_ext_pure(c_eff),
        trio_fraction=trio_fraction,
        covariance=quadratic.covariance.tolist(),
    )

    von_neumann = frame[np.abs(frame['q'] - 1.0) < VON_NEUMANN_Q_TOLERANCE].sort_values('L')
    if len(von_neumann) >= 2:
        slope, slope_stderr = fit_log_slope(von_neumann['L'].to_numpy(), von_neumann['mean'].to_numpy(), window)
        fit.von_neumann_slope = slope
        fit.von_neumann_slope_stderr = slope_stderr

    logger.info(f"{model} two_s={two_s}: {fit.summary()}")
    return fit


def write_fit_json(fit: ScalingFit, path) -> Path:
    path = Path(path)
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(fit.to_json_dict(), handle, indent=2)
    logger.info(f"Fit written to {path}")
    return path


def read_fit_json(path) -> dict:
    with open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)


def record_fit(fit: ScalingFit, fit_path):
    """Store the fit in the database; an unavailable database only warns."""
    from django.db import DatabaseError
    from .models import ScalingFitRecord

    try:
        return ScalingFitRecord.objects.create(
            model=fit.model,
            two_s=fit.two_s,
            q_ext=fit.q_ext,
            delta_q_ext=fit.delta_q_ext,
            c_eff=fit.c_eff,
            q_ext_linear_pred=fit.q_ext_linear_pred,
            chi2_reduced=fit.chi2_reduced if np.isfinite(fit.chi2_reduced) else None,
            fit_path=str(fit_path),
        )
    except DatabaseError as e:
        logger.warning(f"Could not record scaling fit: {e}")
        return None
