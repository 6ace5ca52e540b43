"""
Chains, the Möbius function and hypoelementary tests on the subgroup lattice
"""

import functools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

from sympy import factorint

from mackey.errors import PreconditionError
from mackey.group_core import (
    FiniteGroup,
    Subgroup,
    SubgroupLattice,
    ell_core,
    generate_subgroup,
    is_cyclic,
    lattice_of,
    require_prime,
    subgroup_generators,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubgroupChain:
    """U = H_0 < H_1 < ... < H_n = H, with the lattice index of every link"""

    indices: Tuple[int, ...]
    links: Tuple[Subgroup, ...]

    @property
    def length(self) -> int:
        return len(self.indices) - 1


def _interval(lattice: SubgroupLattice, U: Subgroup, H: Subgroup) -> Tuple[int, int]:
    u = lattice.index_of(U.elements)
    h = lattice.index_of(H.elements)
    if not lattice.contains(h, u):
        raise PreconditionError("U is not contained in H")
    return u, h


def walk_chains(lattice: SubgroupLattice, u: int, h: int) -> Iterator[Tuple[int, ...]]:
    """Depth-first over strictly increasing chains from H_u to H_h, next link in lattice order"""
    if not lattice.contains(h, u):
        raise PreconditionError("U is not contained in H")
    above = [k for k in range(len(lattice)) if lattice.contains(h, k)]

    def extend(path: List[int]) -> Iterator[Tuple[int, ...]]:
        current = path[-1]
        if current == h:
            yield tuple(path)
            return
        for k in above:
            if k != current and lattice.contains(k, current):
                path.append(k)
                yield from extend(path)
                path.pop()

    yield from extend([u])


def chains_between(G: FiniteGroup, U: Subgroup, H: Subgroup) -> List[SubgroupChain]:
    lattice = lattice_of(G)
    u, h = _interval(lattice, U, H)
    return [SubgroupChain(path, tuple(lattice.subgroups[k] for k in path)) for path in walk_chains(lattice, u, h)]


def chain_length_census(G: FiniteGroup, U: Subgroup, H: Subgroup) -> Dict[int, int]:
    """Number of chains from U to H of each length"""
    lattice = lattice_of(G)
    u, h = _interval(lattice, U, H)
    return dict(sorted(Counter(len(path) - 1 for path in walk_chains(lattice, u, h)).items()))


@dataclass(frozen=True)
class MoebiusTable:
    """μ(U, H) for every pair of lattice indices with U <= H"""

    group: FiniteGroup
    values: Dict[Tuple[int, int], int]

    def __call__(self, u: int, h: int) -> int:
        return self.values[(u, h)]

    def row_sums_vanish(self) -> bool:
        lattice = lattice_of(self.group)
        for (u, h) in self.values:
            if u == h:
                continue
            total = sum(self.values[(u, k)] for k in range(len(lattice))
                        if lattice.contains(k, u) and lattice.contains(h, k))
            if total != 0:
                logger.warning(f"Möbius row sum over [{u}, {h}] is {total}")
                return False
        return True


@functools.lru_cache(maxsize=32)
def moebius_table(G: FiniteGroup) -> MoebiusTable:
    """
    Interval recursion μ(U,U) = 1, μ(U,H) = -Σ_{U <= K < H} μ(U,K)

    Proper subgroups come earlier in lattice order, so one forward pass per U suffices.
    """
    lattice = lattice_of(G)
    count = len(lattice)
    values: Dict[Tuple[int, int], int] = {}
    for u in range(count):
        above = [k for k in range(u, count) if lattice.contains(k, u)]
        for h in above:
            if h == u:
                values[(u, h)] = 1
                continue
            values[(u, h)] = -sum(values[(u, k)] for k in above
                                  if k != h and lattice.contains(h, k) and (u, k) in values)
    logger.debug(f"Möbius table with {len(values)} intervals for a group of order {G.order}")
    return MoebiusTable(G, values)


def moebius(G: FiniteGroup, U: Subgroup, H: Subgroup) -> int:
    lattice = lattice_of(G)
    u, h = _interval(lattice, U, H)
    return moebius_table(G)(u, h)


def hall_cross_check(G: FiniteGroup) -> List[dict]:
    """
    Compare the recursion against Σ (-1)^length over explicit chains on every interval

    Returns:
        One entry per disagreeing interval; empty when both agree everywhere
    """
    lattice = lattice_of(G)
    table = moebius_table(G)
    mismatches = []
    for (u, h), value in sorted(table.values.items()):
        parity_sum = sum((-1) ** (len(path) - 1) for path in walk_chains(lattice, u, h))
        if parity_sum != value:
            mismatches.append({"lower": u, "upper": h, "recursion": value, "chains": parity_sum})
    return mismatches


def is_ell_hypoelementary(G: FiniteGroup, H: Subgroup, ell: int) -> bool:
    """H / O_ℓ(H) is cyclic, i.e. some h in H has <h>·O_ℓ(H) = H"""
    require_prime(ell)
    core = ell_core(G, H, ell)
    core_gens = subgroup_generators(core)
    return any(generate_subgroup(G, core_gens + [h]).order == H.order for h in H.elements)


def is_hypoelementary(G: FiniteGroup, H: Subgroup) -> bool:
    if is_cyclic(H):
        return True
    return any(is_ell_hypoelementary(G, H, p) for p in factorint(H.order))
