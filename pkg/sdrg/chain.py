"""
Active-site bookkeeping for one periodic chain under decimation.

Sites are identified by their original lattice index. A bond is identified by
its left site i and joins i to right[i]. Since trio merges keep the middle
site, the surviving site id is always its representative position.

Couplings are held as ln J: renormalized couplings fall far below the
smallest positive double before the chain is exhausted.

The strongest bond comes from a max-heap with lazy deletion: each bond carries
a validity stamp, bumped whenever the bond changes or its left site is removed.
Heap entries whose stamp no longer matches are dropped when popped.
"""

import heapq
import logging
import math
from typing import List, Optional, Sequence

from .model_kind import ModelKind

logger = logging.getLogger(__name__)


class DecimationError(RuntimeError):
    """Raised when a decimation contract or a chain invariant is violated."""


class ChainState:

    def __init__(self,
                 model: ModelKind,
                 couplings: Sequence[float],
                 kappa_left: float = 1.0,
                 kappa_right: float = 1.0):
        """
        Build the periodic chain 0-1-...-(N-1)-0.

        Args:
            model: Hamiltonian selector
            couplings: couplings[i] joins site i and site (i + 1) mod N
            kappa_left: Trio coefficient applied to the outer left coupling
            kappa_right: Trio coefficient applied to the outer right coupling
        """
        n_sites = len(couplings)
        if n_sites < 2:
            raise DecimationError(f"A chain needs at least 2 sites, got {n_sites}")
        if min(couplings) <= 0.0:
            raise DecimationError("All couplings must be positive")
        if kappa_left <= 0.0 or kappa_right <= 0.0:
            raise DecimationError(f"Trio coefficients must be positive, got {kappa_left}, {kappa_right}")

        self.model = model
        self.n_sites = n_sites
        self.log_kappa_left = math.log(kappa_left)
        self.log_kappa_right = math.log(kappa_right)

        self.log_coupling: List[float] = [math.log(j) for j in couplings]

        self.left: List[int] = [(i - 1) % n_sites for i in range(n_sites)]
        self.right: List[int] = [(i + 1) % n_sites for i in range(n_sites)]
        self.alive: List[bool] = [True] * n_sites
        self.stamp: List[int] = [0] * n_sites
        self.n_active = n_sites
        # any alive site, used as a traversal start
        self.entry = 0

        self._heap = [(-log_j, i, 0) for i, log_j in enumerate(self.log_coupling)]
        heapq.heapify(self._heap)

    def strength(self, site: int) -> float:
        """Linear coupling of the bond at `site`; underflows to 0.0 deep in the flow."""
        return math.exp(self.log_coupling[site])

    def push_bond(self, site: int):
        """Invalidate older heap entries of the bond at `site` and push its current strength."""
        self.stamp[site] += 1
        heapq.heappush(self._heap, (-self.log_coupling[site], site, self.stamp[site]))

    def remove_site(self, site: int):
        self.alive[site] = False
        self.stamp[site] += 1

    def strongest_bond(self) -> Optional[int]:
        """
        Left site of the strongest active bond, ties broken by smallest position.
        Stale entries are discarded on the way. None when no bond remains.
        """
        heap = self._heap
        alive = self.alive
        stamp = self.stamp
        while heap:
            _, site, entry_stamp = heap[0]
            if alive[site] and stamp[site] == entry_stamp:
                return site
            heapq.heappop(heap)
        return None

    def positions(self) -> List[int]:
        """Representative positions of the active sites in cycle order from `entry`."""
        if self.n_active == 0:
            return []
        order = [self.entry]
        site = self.right[self.entry]
        while site != self.entry and len(order) <= self.n_active:
            order.append(site)
            site = self.right[site]
        return order

    def check_local(self, *sites: int):
        for site in sites:
            if not self.alive[site]:
                raise DecimationError(f"Site {site} is not active")
            right = self.right[site]
            if self.left[right] != site:
                raise DecimationError(f"Broken link {site} -> {right}")
            if self.n_active > 1 and not math.isfinite(self.log_coupling[site]):
                raise DecimationError(f"Non-finite log coupling {self.log_coupling[site]} at bond {site}")

    def check_integrity(self):
        """Full traversal: the links must form a single cycle over all active sites."""
        if self.n_active == 0:
            return
        if not self.alive[self.entry]:
            raise DecimationError(f"Traversal entry {self.entry} is not active")
        visited = 0
        site = self.entry
        while True:
            self.check_local(site)
            visited += 1
            if visited > self.n_active:
                raise DecimationError("Links do not close into a single cycle")
            site = self.right[site]
            if site == self.entry:
                break
        if visited != self.n_active:
            raise DecimationError(
                f"Cycle covers {visited} sites but {self.n_active} are active"
            )
