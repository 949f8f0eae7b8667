"""
Random coupling configurations for disordered spin chains.

Couplings follow the gapless power law P(J) ∝ J^(-alpha) on (0, support_max].
Every configuration owns an independent random stream derived from
(master_seed, config_index), so ensembles give identical couplings no matter
how configurations are split across workers.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DisorderSpec:
    """Power-law coupling distribution plus the ensemble master seed."""

    exponent_alpha: float = 0.8
    support_max: float = 1.0
    master_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.exponent_alpha < 1.0:
            raise ValueError(
                f"exponent_alpha must lie in [0, 1) for a normalizable P(J), got {self.exponent_alpha}"
            )
        if not self.support_max > 0.0:
            raise ValueError(f"support_max must be positive, got {self.support_max}")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")


def inverse_cdf(u, spec: DisorderSpec):
    """
    Map uniform draws u in (0, 1] to couplings.

    F(J) = (J / support_max)^(1 - alpha), hence J = support_max * u^(1 / (1 - alpha)).
    """
    exponent = 1.0 / (1.0 - spec.exponent_alpha)
    return spec.support_max * np.power(u, exponent)


def configuration_rng(spec: DisorderSpec, config_index: int) -> np.random.Generator:
    """Independent generator for one configuration, keyed by (master_seed, config_index)."""
    if config_index < 0:
        raise ValueError(f"config_index must be nonnegative, got {config_index}")
    seed_sequence = np.random.SeedSequence(
        entropy=int(spec.master_seed),
        spawn_key=(int(config_index),),
    )
    return np.random.Generator(np.random.PCG64(seed_sequence))


def sample_couplings(spec: DisorderSpec, n_sites: int, config_index: int) -> np.ndarray:
    """
    Draw the n_sites bond strengths of one periodic chain.

    Args:
        spec: Distribution and master seed
        n_sites: Number of sites (and bonds, periodic); even and at least 4
        config_index: Position of the configuration inside the ensemble

    Returns:
        float64 array of n_sites couplings in (0, support_max]
    """
    if n_sites < 4 or n_sites % 2 != 0:
        raise ValueError(f"n_sites must be even and at least 4, got {n_sites}")

    rng = configuration_rng(spec, config_index)
    # random() is uniform on [0, 1); flipping it excludes u = 0 and with it J = 0
    u = 1.0 - rng.random(n_sites)
    return inverse_cdf(u, spec)


def sample_ensemble(spec: DisorderSpec, n_sites: int, indices: Iterable[int]) -> List[np.ndarray]:
    """Couplings for a batch of configuration indices."""
    return [sample_couplings(spec, n_sites, index) for index in indices]
