"""
Tsallis q-entropy in nats.

For n singlets of spin S crossing a block the reduced state is maximally mixed
on D^n levels (D = 2S + 1), so

    S_q^(n) = [D^(n(1-q)) - 1] / (1 - q),

which tends to n ln D at q = 1.
"""

import math
import sys

import numpy as np

# |1 - q| below this uses the von Neumann limit
VON_NEUMANN_TOLERANCE = 1e-9
# largest exponent x with exp(x) finite
MAX_EXPONENT = math.log(sys.float_info.max)
# eigenvalues below this are treated as outside the support of rho
SPECTRUM_CUTOFF = 1e-14


class EntropyOverflowError(OverflowError):
    """D^(n(1-q)) exceeds the floating-point range; narrow the q or L range."""

    def __init__(self, n, q, two_s, block_size=None):
        self.n = n
        self.q = q
        self.two_s = two_s
        self.block_size = block_size
        where = f", L={block_size}" if block_size is not None else ""
        super().__init__(
            f"S_q overflows for n={n}, q={q}{where}, two_s={two_s}; narrow the q range or the block sizes"
        )


def _is_von_neumann(q: float) -> bool:
    return abs(1.0 - q) < VON_NEUMANN_TOLERANCE


def tsallis_singlet_entropy(n: int, q: float, two_s: int) -> float:
    """Entropy of a block crossed by n spin-(two_s/2) singlets."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if not math.isfinite(q):
        raise ValueError(f"q must be finite, got {q}")
    log_d = math.log(two_s + 1)
    if _is_von_neumann(q):
        return n * log_d
    exponent = n * (1.0 - q) * log_d
    if exponent > MAX_EXPONENT:
        raise EntropyOverflowError(n, q, two_s)
    return math.expm1(exponent) / (1.0 - q)


def tsallis_entropy_of_counts(counts: np.ndarray, q: float, two_s: int) -> np.ndarray:
    """Vectorized tsallis_singlet_entropy over an integer array of crossing counts."""
    counts = np.asarray(counts)
    log_d = math.log(two_s + 1)
    if _is_von_neumann(q):
        return counts * log_d
    exponent = counts * ((1.0 - q) * log_d)
    if exponent.size and exponent.max() > MAX_EXPONENT:
        raise EntropyOverflowError(int(counts.flat[np.argmax(exponent)]), q, two_s)
    return np.expm1(exponent) / (1.0 - q)


def pseudo_additive_compose(s_a: float, s_b: float, q: float) -> float:
    """S_q of a product state from the entropies of its independent factors."""
    return s_a + s_b + (1.0 - q) * s_a * s_b


def tsallis_entropy_of_spectrum(eigenvalues, q: float) -> float:
    """
    (Tr rho^q - 1) / (1 - q) over the support of rho; -Tr rho ln rho at q = 1.
    """
    p = np.asarray(eigenvalues, dtype=float)
    p = p[p > SPECTRUM_CUTOFF]
    if _is_von_neumann(q):
        return float(-np.sum(p * np.log(p)))
    return float((np.sum(np.power(p, q)) - 1.0) / (1.0 - q))
