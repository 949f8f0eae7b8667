"""
Exact Tsallis entropy of explicit singlet-product states.

The full pure state of a perfect matching of spin-S singlets is built as a
dense tensor, the complement of the block [0, L) is traced out, and the
q-entropy is evaluated on the reduced spectrum. Used by the test suite as an
independent check of the closed form for n crossing singlets.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from entropy.tsallis import tsallis_entropy_of_spectrum

logger = logging.getLogger(__name__)

# largest chain per two_s for which the dense state stays small
MAX_SITES = {1: 16, 2: 8, 3: 6}
TRACE_TOLERANCE = 1e-12


class OracleSizeError(ValueError):
    """Requested system exceeds the dense-state limits of the oracle."""


@dataclass(frozen=True)
class SingletLayout:
    n_sites: int
    pairing: Tuple[Tuple[int, int], ...]
    cut: int

    def __post_init__(self):
        pairing = tuple(tuple(sorted(pair)) for pair in self.pairing)
        object.__setattr__(self, 'pairing', pairing)
        if self.n_sites < 2 or self.n_sites % 2:
            raise ValueError(f"n_sites must be even and at least 2, got {self.n_sites}")
        covered = sorted(site for pair in pairing for site in pair)
        if covered != list(range(self.n_sites)):
            raise ValueError(f"Pairing {pairing} does not cover every site exactly once")
        if not 1 <= self.cut < self.n_sites:
            raise ValueError(f"Cut must lie in [1, {self.n_sites}), got {self.cut}")

    @property
    def crossing_count(self) -> int:
        return sum(1 for a, b in self.pairing if (a < self.cut) != (b < self.cut))


def singlet_matrix(two_s: int) -> np.ndarray:
    """Amplitudes C[m1, m2] of the two-spin singlet, basis ordered m = S, S-1, ..., -S."""
    dim = two_s + 1
    matrix = np.zeros((dim, dim))
    for k in range(dim):
        matrix[k, dim - 1 - k] = (-1) ** k / np.sqrt(dim)
    return matrix


def singlet_product_state(layout: SingletLayout, two_s: int) -> np.ndarray:
    """Rank-N tensor of the product state, axis k belonging to site k."""
    limit = MAX_SITES.get(two_s)
    if limit is None or layout.n_sites > limit:
        raise OracleSizeError(f"{layout.n_sites} sites with two_s={two_s} exceed the oracle limits {MAX_SITES}")

    pair_state = singlet_matrix(two_s)
    state = np.ones(())
    axis_sites: List[int] = []
    for a, b in layout.pairing:
        state = np.multiply.outer(state, pair_state)
        axis_sites.extend((a, b))
    return np.transpose(state, np.argsort(axis_sites))


def reduced_density_matrix(state: np.ndarray, block_axes: Sequence[int]) -> np.ndarray:
    """
    Reduced density matrix of the block by summing over the complement.
    The smaller side is kept; both sides share the nonzero spectrum.
    """
    dims = state.shape
    rest_axes = [axis for axis in range(state.ndim) if axis not in block_axes]
    block_dim = int(np.prod([dims[axis] for axis in block_axes]))
    matrix = np.transpose(state, list(block_axes) + rest_axes).reshape(block_dim, -1)
    if matrix.shape[0] <= matrix.shape[1]:
        return matrix @ matrix.conj().T
    return matrix.conj().T @ matrix


def checked_spectrum(rho: np.ndarray) -> np.ndarray:
    eigenvalues = linalg.eigvalsh(rho)
    trace = float(np.sum(eigenvalues))
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise ArithmeticError(f"Reduced density matrix has trace {trace}")
    if eigenvalues.min() < -TRACE_TOLERANCE:
        raise ArithmeticError(f"Reduced density matrix has negative eigenvalue {eigenvalues.min()}")
    return eigenvalues


def exact_block_entropy(layout: SingletLayout, q: float, two_s: int) -> float:
    state = singlet_product_state(layout, two_s)
    rho = reduced_density_matrix(state, list(range(layout.cut)))
    return tsallis_entropy_of_spectrum(checked_spectrum(rho), q)


def perfect_matchings(sites: Sequence[int]) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Every perfect matching of an even set of sites."""
    if not sites:
        yield ()
        return
    first, rest = sites[0], sites[1:]
    for index, partner in enumerate(rest):
        remaining = rest[:index] + rest[index + 1:]
        for matching in perfect_matchings(remaining):
            yield ((first, partner),) + matching


def random_layout(n_sites: int, cut: int, rng: np.random.Generator) -> SingletLayout:
    order = rng.permutation(n_sites)
    pairing = tuple((int(a), int(b)) for a, b in zip(order[::2], order[1::2]))
    return SingletLayout(n_sites, pairing, cut)


def all_layouts(n_sites: int) -> Iterator[SingletLayout]:
    """Every pairing and every cut of an n-site chain."""
    for pairing, cut in itertools.product(perfect_matchings(list(range(n_sites))), range(1, n_sites)):
        yield SingletLayout(n_sites, pairing, cut)
