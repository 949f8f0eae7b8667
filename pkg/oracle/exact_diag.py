"""
Dense exact diagonalization of short periodic spin-1/2 Heisenberg rings,
H = sum_i J_i S_i . S_{i+1}, in the S^z = 0 sector.

Spin configurations are bit strings, bit i set iff site i points up.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from entropy.tsallis import tsallis_entropy_of_spectrum
from .singlets import OracleSizeError, checked_spectrum, reduced_density_matrix

logger = logging.getLogger(__name__)

MAX_ED_SITES = 12
DEGENERACY_TOLERANCE = 1e-10


class DegenerateGroundStateError(RuntimeError):
    """The two lowest levels coincide, so the ground state is not unique."""


def sz0_basis(n_sites: int) -> Tuple[List[int], Dict[int, int]]:
    states = [state for state in range(2 ** n_sites) if bin(state).count('1') == n_sites // 2]
    return states, {state: index for index, state in enumerate(states)}


def heisenberg_hamiltonian(couplings: Sequence[float]) -> Tuple[np.ndarray, List[int]]:
    """Dense Hamiltonian matrix on the S^z = 0 sector and its basis states."""
    n_sites = len(couplings)
    states, mapping = sz0_basis(n_sites)
    hamiltonian = np.zeros((len(states), len(states)))

    for column, state in enumerate(states):
        for i in range(n_sites):
            j = (i + 1) % n_sites
            coupling = couplings[i]
            si = (state >> i) & 1
            sj = (state >> j) & 1
            if si == sj:
                hamiltonian[column, column] += 0.25 * coupling
            else:
                hamiltonian[column, column] -= 0.25 * coupling
                flipped = state ^ ((1 << i) | (1 << j))
                hamiltonian[mapping[flipped], column] += 0.5 * coupling
    return hamiltonian, states


def ground_state(couplings: Sequence[float]) -> Tuple[float, np.ndarray]:
    """
    Lowest eigenpair, the vector expanded to the full 2^N space.

    Raises:
        DegenerateGroundStateError: when the ground level is degenerate
    """
    n_sites = len(couplings)
    hamiltonian, states = heisenberg_hamiltonian(couplings)
    energies, vectors = linalg.eigh(hamiltonian, subset_by_index=[0, min(1, len(states) - 1)])
    if len(energies) > 1 and energies[1] - energies[0] < DEGENERACY_TOLERANCE * max(1.0, abs(energies[0])):
        raise DegenerateGroundStateError(
            f"Ground level {energies[0]:.12g} is degenerate within {DEGENERACY_TOLERANCE}"
        )
    full = np.zeros(2 ** n_sites)
    full[states] = vectors[:, 0]
    return float(energies[0]), full


def exact_ground_block_entropy(couplings: Sequence[float],
                               n_sites: int,
                               q: float,
                               block_size: int,
                               anchor: int = 0,
                               two_s: int = 1) -> float:
    """
    S_q of the block [anchor, anchor + L) (mod N) in the exact ground state.

    Args:
        couplings: n_sites couplings, couplings[i] joins i and i + 1 (mod N)
        n_sites: Even ring length, at most 12
        q: Entropic index
        block_size: L
        anchor: First site of the block
        two_s: Must be 1; only spin-1/2 rings are diagonalized
    """
    if two_s != 1:
        raise OracleSizeError("Exact diagonalization is available for spin-1/2 only")
    if len(couplings) != n_sites:
        raise ValueError(f"Expected {n_sites} couplings, got {len(couplings)}")
    if n_sites % 2 or not 2 <= n_sites <= MAX_ED_SITES:
        raise OracleSizeError(f"n_sites must be even and in [2, {MAX_ED_SITES}], got {n_sites}")
    if not 1 <= block_size < n_sites:
        raise ValueError(f"Block size must lie in [1, {n_sites}), got {block_size}")

    _, vector = ground_state(couplings)
    # C-order axis k holds bit N-1-k
    state = vector.reshape((2,) * n_sites)
    block_axes = [n_sites - 1 - (anchor + k) % n_sites for k in range(block_size)]
    rho = reduced_density_matrix(state, block_axes)
    return tsallis_entropy_of_spectrum(checked_spectrum(rho), q)
