"""
Generalized Ma-Dasgupta-Hu decimation of a random antiferromagnetic spin-S chain.

At each step the strongest bond Omega is taken. If its strongest neighbouring
bond J1 stays below 3 Omega / [2S(S+1)] the pair is frozen into a singlet and
its outer neighbours are joined by J' = prefactor * J1 * J2 / Omega. Otherwise
the three spins joined by Omega and J1 become one effective spin S sitting at
the middle site.

The chain works on ln J throughout; the linear forms below are kept for
callers holding ordinary coupling values.
"""

import logging
import math
from typing import List, Sequence, Tuple

from .chain import ChainState, DecimationError
from .events import DecimationEvent, Singlet, TrioMerge
from .model_kind import ModelKind

logger = logging.getLogger(__name__)

LEFT = 'left'
RIGHT = 'right'


def log_renormalized_coupling(model: ModelKind, log_j1: float, log_j2: float, log_omega: float) -> float:
    """ln J' for the outer neighbours of a decimated singlet."""
    return math.log(model.prefactor) + log_j1 + log_j2 - log_omega


def renormalized_coupling(model: ModelKind, j1: float, j2: float, omega: float) -> float:
    """Effective coupling between the outer neighbours of a decimated singlet."""
    if j1 <= 0.0 or j2 <= 0.0 or omega <= 0.0:
        raise ValueError(f"Couplings must be positive, got j1={j1}, j2={j2}, omega={omega}")
    return math.exp(log_renormalized_coupling(model, math.log(j1), math.log(j2), math.log(omega)))


def log_trio_condition(model: ModelKind, log_j_max_neighbor: float, log_omega: float) -> bool:
    ratio = model.trio_ratio
    if ratio is None:
        return False
    return log_j_max_neighbor > math.log(ratio) + log_omega


def trio_condition(model: ModelKind, j_max_neighbor: float, omega: float) -> bool:
    """True when the strongest neighbour of Omega forces a trio merge."""
    if j_max_neighbor <= 0.0 or omega <= 0.0:
        raise ValueError(f"Couplings must be positive, got j={j_max_neighbor}, omega={omega}")
    return log_trio_condition(model, math.log(j_max_neighbor), math.log(omega))


def _strong_side(chain: ChainState, bond: int) -> Tuple[str, float, float]:
    """Side of the stronger neighbour bond of Omega (as ln J); ties go to the smaller position."""
    outer_left = chain.left[bond]
    log_left = chain.log_coupling[outer_left]
    log_right = chain.log_coupling[chain.right[bond]]
    if (-log_left, outer_left) <= (-log_right, chain.right[bond]):
        return LEFT, log_left, log_right
    return RIGHT, log_right, log_left


def decimate_pair(chain: ChainState, bond: int) -> Tuple[ChainState, Singlet]:
    """
    Freeze the sites joined by `bond` into a singlet.

    The outer neighbours are linked with the renormalized coupling; with only
    two active sites left the chain is simply emptied.
    """
    if chain.n_active < 2:
        raise DecimationError(f"Pair decimation needs 2 active sites, found {chain.n_active}")

    a = bond
    b = chain.right[a]
    event = Singlet(a, b)
    log_omega = chain.log_coupling[a]

    if chain.n_active == 2:
        chain.remove_site(a)
        chain.remove_site(b)
        chain.n_active = 0
        chain.entry = -1
        return chain, event

    outer_left = chain.left[a]
    outer_right = chain.right[b]
    chain.remove_site(a)
    chain.remove_site(b)
    chain.n_active -= 2
    chain.entry = outer_left

    if outer_left == outer_right:
        # lone residual site
        chain.left[outer_left] = chain.right[outer_left] = outer_left
        chain.stamp[outer_left] += 1
        return chain, event

    chain.log_coupling[outer_left] = log_renormalized_coupling(
        chain.model, chain.log_coupling[outer_left], chain.log_coupling[b], log_omega
    )
    chain.right[outer_left] = outer_right
    chain.left[outer_right] = outer_left
    chain.push_bond(outer_left)
    return chain, event


def decimate_trio(chain: ChainState, bond: int, strong_neighbor_side: str) -> Tuple[ChainState, TrioMerge]:
    """
    Replace the three spins joined by Omega (`bond`) and its strong neighbour
    by one effective spin S at the middle site. The outer couplings are scaled
    by kappa_left and kappa_right.
    """
    if chain.model.trio_ratio is None:
        raise DecimationError(f"Trio merges are not defined for {chain.model.label}")
    if chain.n_active < 3:
        raise DecimationError(f"Trio merge needs 3 active sites, found {chain.n_active}")

    if strong_neighbor_side == LEFT:
        first, mid = chain.left[bond], bond
        last = chain.right[bond]
    elif strong_neighbor_side == RIGHT:
        first, mid = bond, chain.right[bond]
        last = chain.right[mid]
    else:
        raise ValueError(f"strong_neighbor_side must be '{LEFT}' or '{RIGHT}'")

    event = TrioMerge(first, mid, last, mid)
    outer_left = chain.left[first]
    outer_right = chain.right[last]
    log_outer_left = chain.log_coupling[outer_left]
    log_outer_right = chain.log_coupling[last]

    chain.remove_site(first)
    chain.remove_site(last)
    chain.n_active -= 2
    chain.entry = mid

    if chain.n_active == 1:
        chain.left[mid] = chain.right[mid] = mid
        chain.stamp[mid] += 1
        return chain, event

    chain.log_coupling[outer_left] = chain.log_kappa_left + log_outer_left
    chain.right[outer_left] = mid
    chain.left[mid] = outer_left
    chain.push_bond(outer_left)

    chain.log_coupling[mid] = chain.log_kappa_right + log_outer_right
    chain.right[mid] = outer_right
    chain.left[outer_right] = mid
    chain.push_bond(mid)
    return chain, event


def _is_power_of_two(step: int) -> bool:
    return step & (step - 1) == 0


def run_configuration(model: ModelKind,
                      couplings: Sequence[float],
                      n_sites: int,
                      kappa_left: float = 1.0,
                      kappa_right: float = 1.0,
                      debug: bool = False) -> List[DecimationEvent]:
    """
    Decimate one configuration until no bond is left.

    Args:
        model: Hamiltonian selector
        couplings: n_sites periodic couplings
        n_sites: Chain length, even
        kappa_left, kappa_right: Trio outer-coupling coefficients
        debug: Check links around every step, energy-scale monotonicity on the
            singlet path, and the full cycle at geometrically spaced steps

    Returns:
        Events in decimation order
    """
    if len(couplings) != n_sites:
        raise ValueError(f"Expected {n_sites} couplings, got {len(couplings)}")
    if n_sites % 2 != 0:
        raise ValueError(f"n_sites must be even, got {n_sites}")

    chain = ChainState(model, couplings, kappa_left, kappa_right)
    events: List[DecimationEvent] = []
    log_trio_ratio = None if model.trio_ratio is None else math.log(model.trio_ratio)
    step = 0

    while chain.n_active >= 2:
        bond = chain.strongest_bond()
        if bond is None:
            raise DecimationError(f"No active bond left with {chain.n_active} active sites")
        log_omega = chain.log_coupling[bond]
        step += 1

        if log_trio_ratio is not None and chain.n_active >= 3:
            side, log_strong, _ = _strong_side(chain, bond)
            if log_strong > log_trio_ratio + log_omega:
                chain, event = decimate_trio(chain, bond, side)
                events.append(event)
                if debug:
                    _debug_check(chain, step)
                continue

        outer_left = chain.left[bond]
        chain, event = decimate_pair(chain, bond)
        events.append(event)
        if debug:
            if chain.n_active >= 2 and chain.log_coupling[outer_left] >= log_omega:
                raise DecimationError(
                    f"Step {step}: renormalized ln J {chain.log_coupling[outer_left]} "
                    f"is not below the decimated scale ln Omega = {log_omega}"
                )
            _debug_check(chain, step)

    logger.debug(f"Configuration of {n_sites} sites finished after {step} steps")
    return events


def _debug_check(chain: ChainState, step: int):
    if chain.n_active >= 1:
        chain.check_local(chain.entry, chain.left[chain.entry])
    if _is_power_of_two(step) or chain.n_active <= 2:
        chain.check_integrity()
