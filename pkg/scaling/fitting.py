"""
Power-law and extensivity fits.

S_q(L) ~ L^gamma is fitted per q on log-log axes, gamma(q) = u q^2 + v q + w
by weighted least squares, and q_ext solves gamma(q_ext) = 1 with
delta_q_ext = delta_gamma / |2 u q_ext + v|.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)

MIN_POWER_LAW_POINTS = 4
MIN_QUADRATIC_POINTS = 5
LINEAR_BRANCH_TOLERANCE = 1e-12
# empirical constant of the linear law q_ext = 1 - k / c_eff
LINEAR_LAW_CONSTANT = 1.67


class FitError(ValueError):
    """A fit could not be carried out; the message says how to fix the input."""


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    gamma_stderr: float
    intercept: float
    n_points: int


@dataclass(frozen=True)
class QuadraticFit:
    u: float
    v: float
    w: float
    covariance: np.ndarray
    chi2_reduced: float
    weighted: bool


def fit_power_law(sizes: Sequence[float],
                  means: Sequence[float],
                  stderrs: Optional[Sequence[float]] = None,
                  window: Optional[Tuple[float, float]] = None) -> PowerLawFit:
    """
    Ordinary least squares of ln(mean) on ln(L).

    Args:
        sizes: Block sizes L, strictly increasing
        means: Ensemble means of S_q
        stderrs: Standard errors of the means (carried for reporting only)
        window: Inclusive (l_min, l_max) fit window

    Returns:
        PowerLawFit with the slope gamma and its regression standard error
    """
    sizes = np.asarray(sizes, dtype=float)
    means = np.asarray(means, dtype=float)
    if np.any(np.diff(sizes) <= 0):
        raise FitError("Block sizes must be strictly increasing")

    usable = means > 0.0
    if window is not None:
        l_min, l_max = window
        usable &= (sizes >= l_min) & (sizes <= l_max)
    if np.count_nonzero(usable) < MIN_POWER_LAW_POINTS:
        raise FitError(
            f"Only {np.count_nonzero(usable)} usable points with positive mean inside the fit window; "
            f"{MIN_POWER_LAW_POINTS} are needed. Widen the block ladder or the fit window."
        )

    result = stats.linregress(np.log(sizes[usable]), np.log(means[usable]))
    stderr = float(result.stderr) if math.isfinite(result.stderr) else 0.0
    return PowerLawFit(
        gamma=float(result.slope),
        gamma_stderr=stderr,
        intercept=float(result.intercept),
        n_points=int(np.count_nonzero(usable)),
    )


def fit_log_slope(sizes: Sequence[float], means: Sequence[float],
                  window: Optional[Tuple[float, float]] = None) -> Tuple[float, float]:
    """Slope (and its stderr) of mean S_1 against ln L; equals c_eff / 3 in the random singlet phase."""
    sizes = np.asarray(sizes, dtype=float)
    means = np.asarray(means, dtype=float)
    usable = np.ones_like(sizes, dtype=bool)
    if window is not None:
        usable &= (sizes >= window[0]) & (sizes <= window[1])
    if np.count_nonzero(usable) < 2:
        raise FitError("At least 2 block sizes are needed for the logarithmic slope")
    result = stats.linregress(np.log(sizes[usable]), means[usable])
    return float(result.slope), float(result.stderr)


def fit_gamma_quadratic(q_values: Sequence[float],
                        gammas: Sequence[float],
                        gamma_stderrs: Sequence[float],
                        weighted: bool = True) -> QuadraticFit:
    """
    Least squares of gamma on (q^2, q, 1), weighted by 1 / stderr^2.

    Falls back to the unweighted fit when any stderr is not positive.
    """
    q = np.asarray(q_values, dtype=float)
    gamma = np.asarray(gammas, dtype=float)
    sigma = np.asarray(gamma_stderrs, dtype=float)
    if q.size < MIN_QUADRATIC_POINTS:
        raise FitError(f"{q.size} q points given; at least {MIN_QUADRATIC_POINTS} are needed")

    design = np.column_stack([q ** 2, q, np.ones_like(q)])
    if np.linalg.matrix_rank(design) < 3:
        raise FitError("Quadratic design is rank deficient; the q values must be distinct")

    if weighted and np.any(sigma <= 0.0):
        logger.warning("Nonpositive gamma stderr found; using the unweighted quadratic fit")
        weighted = False

    weights = 1.0 / sigma if weighted else np.ones_like(q)
    coefficients, *_ = np.linalg.lstsq(design * weights[:, None], gamma * weights, rcond=None)
    residuals = gamma - design @ coefficients
    dof = q.size - 3

    if weighted:
        covariance = np.linalg.inv(design.T @ (design * (weights ** 2)[:, None]))
        chi2_reduced = float(np.sum((residuals * weights) ** 2) / dof)
    else:
        residual_variance = float(np.sum(residuals ** 2) / dof)
        covariance = np.linalg.inv(design.T @ design) * residual_variance
        chi2_reduced = residual_variance

    u, v, w = (float(c) for c in coefficients)
    logger.debug(f"gamma(q) = {u:.6g} q^2 + {v:.6g} q + {w:.6g} (chi2/dof = {chi2_reduced:.3g})")
    return QuadraticFit(u=u, v=v, w=w, covariance=covariance, chi2_reduced=chi2_reduced, weighted=weighted)


def delta_gamma(gamma_stderrs: Sequence[float], policy: str = 'median') -> float:
    stderrs = np.asarray(gamma_stderrs, dtype=float)
    if policy == 'median':
        return float(np.median(stderrs))
    if policy == 'max':
        return float(np.max(stderrs))
    raise FitError(f"Unknown delta-gamma policy '{policy}'; use 'median' or 'max'")


def solve_q_ext(u: float, v: float, w: float,
                scan_interval: Tuple[float, float],
                dgamma: float) -> Tuple[float, float]:
    """
    Root of u q^2 + v q + (w - 1) = 0 inside the scan interval, with its
    propagated error dgamma / |2 u q_ext + v|.
    """
    low, high = min(scan_interval), max(scan_interval)

    if abs(u) < LINEAR_BRANCH_TOLERANCE:
        if v == 0.0:
            raise FitError("gamma(q) is flat; no q_ext exists. Scan a wider q range.")
        roots = [(1.0 - w) / v]
    else:
        discriminant = v * v - 4.0 * u * (w - 1.0)
        if discriminant < 0.0:
            raise FitError(
                "gamma(q) never reaches 1 (no real root); widen the q scan or move it toward the extensive region"
            )
        sqrt_disc = math.sqrt(discriminant)
        # numerically stable pair of roots
        t = -0.5 * (v + math.copysign(sqrt_disc, v))
        roots = [t / u, (w - 1.0) / t] if t != 0.0 else [0.0, 0.0]

    inside = sorted({root for root in roots if low <= root <= high})
    if not inside:
        raise FitError(
            f"Roots {sorted(roots)} of gamma(q) = 1 fall outside the scan interval [{low}, {high}]; widen the q scan"
        )
    if len(inside) > 1:
        raise FitError(
            f"Both roots {inside} of gamma(q) = 1 fall inside [{low}, {high}]; narrow the q scan around one of them"
        )

    q_ext = inside[0]
    slope = abs(2.0 * u * q_ext + v)
    if slope == 0.0:
        raise FitError("gamma(q) is stationary at q_ext; the error cannot be propagated")
    return q_ext, dgamma / slope


def c_eff_of_spin(two_s: int) -> float:
    """Effective central charge ln(2S + 1)."""
    if two_s < 1:
        raise ValueError(f"two_s must be at least 1, got {two_s}")
    return math.log(two_s + 1)


def q_ext_pure(c: float) -> float:
    """Extensivity index of a clean conformal chain with central charge c."""
    if c <= 0.0:
        raise ValueError(f"c must be positive, got {c}")
    return (math.sqrt(9.0 + c * c) - 3.0) / c


def q_ext_linear(c_eff: float, k: float = LINEAR_LAW_CONSTANT) -> float:
    """Linear law q_ext = 1 - k / c_eff for random singlet phases."""
    if c_eff <= 0.0:
        raise ValueError(f"c_eff must be positive, got {c_eff}")
    return 1.0 - k / c_eff


def fit_linear_law(c_effs: Sequence[float], q_exts: Sequence[float],
                   deltas: Optional[Sequence[float]] = None) -> Tuple[float, float]:
    """
    Fit q_ext = 1 - k / c_eff through the origin of (1/c_eff, 1 - q_ext),
    weighted by 1 / delta^2 when errors are given. Returns (k, k_stderr).
    """
    x = 1.0 / np.asarray(c_effs, dtype=float)
    y = 1.0 - np.asarray(q_exts, dtype=float)
    if x.size < 2:
        raise FitError("At least 2 models are needed to fit the linear law")
    if deltas is not None and np.all(np.asarray(deltas, dtype=float) > 0.0):
        weights = 1.0 / np.square(np.asarray(deltas, dtype=float))
    else:
        weights = np.ones_like(x)
    sxx = float(np.sum(weights * x * x))
    k = float(np.sum(weights * x * y) / sxx)
    residuals = y - k * x
    k_stderr = math.sqrt(float(np.sum(weights * residuals ** 2)) / (x.size - 1) / sxx)
    return k, k_stderr
