"""
Finite groups as explicit Cayley tables built from permutation generators.
Provides subgroups and the subgroup lattice, quotients with their projection,
conjugation, opposite groups and double cosets.
"""

import functools
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sympy import isprime

from mackey.config import Config
from mackey.errors import ContractError, InputError, PreconditionError, SizeCapError

logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]


def validate_permutation(images: Sequence[int], degree: int) -> Permutation:
    """
    Check that images is a bijection of {0, ..., degree-1}

    Args:
        images: images[i] is the image of point i
        degree: number of moved points

    Returns:
        The permutation as a tuple
    """
    perm = tuple(int(x) for x in images)
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise InputError(f"Not a bijection of {{0,...,{degree - 1}}}: {list(images)}")
    return perm


def compose(p: Permutation, q: Permutation) -> Permutation:
    """(p ∘ q)(x) = p(q(x))"""
    return tuple(p[x] for x in q)


@dataclass(frozen=True)
class FiniteGroup:
    """
    A finite group given by its multiplication table.
    Element 0 is the identity whenever the group comes from group_from_generators.
    """

    order: int
    table: Tuple[Tuple[int, ...], ...]
    identity: int
    inverses: Tuple[int, ...]
    element_labels: Optional[Tuple[Permutation, ...]] = None
    generators: Tuple[int, ...] = ()

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self.inverses[i]

    def elements(self) -> range:
        return range(self.order)

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.table[self.table[g][x]][self.inverses[g]]


def _check_table(table: Sequence[Sequence[int]]) -> Tuple[int, Tuple[int, ...]]:
    n = len(table)
    if n == 0:
        raise ContractError("A group needs at least one element")
    full = list(range(n))
    for i, row in enumerate(table):
        if len(row) != n or sorted(row) != full:
            raise ContractError(f"Row {i} of the table is not a bijection")
    for j in range(n):
        if sorted(table[i][j] for i in range(n)) != full:
            raise ContractError(f"Column {j} of the table is not a bijection")

    identity = next((e for e in range(n) if list(table[e]) == full), None)
    if identity is None:
        raise ContractError("No identity element in table")
    inverses = []
    for i in range(n):
        inv = next(j for j in range(n) if table[i][j] == identity)
        if table[inv][i] != identity:
            raise ContractError(f"Element {i} has no two-sided inverse")
        inverses.append(inv)

    if n <= Config.ASSOCIATIVITY_SCAN_LIMIT:
        triples: Iterable = ((i, j, k) for i in range(n) for j in range(n) for k in range(n))
    else:
        rng = random.Random(0)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                   for _ in range(Config.ASSOCIATIVITY_SAMPLES))
    for i, j, k in triples:
        if table[table[i][j]][k] != table[i][table[j][k]]:
            raise ContractError(f"Table is not associative at ({i}, {j}, {k})")
    return identity, tuple(inverses)


def group_from_table(table: Sequence[Sequence[int]],
                     element_labels: Optional[Sequence[Permutation]] = None,
                     generators: Sequence[int] = ()) -> FiniteGroup:
    """Build and validate a FiniteGroup from a Cayley table"""
    frozen = tuple(tuple(int(x) for x in row) for row in table)
    identity, inverses = _check_table(frozen)
    labels = tuple(element_labels) if element_labels is not None else None
    return FiniteGroup(order=len(frozen), table=frozen, identity=identity, inverses=inverses,
                       element_labels=labels, generators=tuple(generators))


def group_from_generators(degree: int, gens: Sequence[Sequence[int]],
                          cap: Optional[int] = None) -> FiniteGroup:
    """
    Close a set of permutations under composition

    Elements are numbered breadth-first from the identity, trying the generators
    in input order, so the numbering is deterministic.

    Args:
        degree: number of points the permutations act on
        gens: generating permutations as image lists
        cap: maximal group order (Config.GROUP_SIZE_CAP when omitted)

    Returns:
        The generated FiniteGroup
    """
    cap = cap if cap is not None else Config.GROUP_SIZE_CAP
    perms = [validate_permutation(g, degree) for g in gens]

    identity = tuple(range(degree))
    index: Dict[Permutation, int] = {identity: 0}
    labels: List[Permutation] = [identity]
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for g in perms:
            nxt = compose(current, g)
            if nxt in index:
                continue
            if len(labels) >= cap:
                raise SizeCapError(f"Closure exceeds the cap of {cap} elements", dimension=len(labels) + 1, cap=cap)
            index[nxt] = len(labels)
            labels.append(nxt)
            queue.append(nxt)

    table = [[index[compose(p, q)] for q in labels] for p in labels]
    group = group_from_table(table, labels, [index[g] for g in perms])
    logger.debug(f"Generated group of order {group.order} on {degree} points")
    return group


@dataclass(frozen=True)
class Subgroup:
    """A subgroup, stored as the sorted tuple of its element indices"""

    parent: FiniteGroup = field(compare=False, repr=False)
    elements: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @functools.cached_property
    def element_set(self) -> FrozenSet[int]:
        return frozenset(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self.element_set

    def issubset(self, other: "Subgroup") -> bool:
        return self.element_set <= other.element_set


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism given by the image of every source element"""

    source: FiniteGroup
    target: FiniteGroup
    images: Tuple[int, ...]

    def __post_init__(self):
        s, t = self.source, self.target
        if len(self.images) != s.order:
            raise InputError("Homomorphism needs one image per source element")
        if self.images[s.identity] != t.identity:
            raise ContractError("Homomorphism does not preserve the identity")
        for i in s.elements():
            for j in s.elements():
                if self.images[s.mul(i, j)] != t.mul(self.images[i], self.images[j]):
                    raise ContractError(f"Not multiplicative at ({i}, {j})")

    def __call__(self, g: int) -> int:
        return self.images[g]

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, tuple(g for g in self.source.elements()
                                           if self.images[g] == self.target.identity))

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order


def make_subgroup(G: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    """Wrap a set of element indices as a Subgroup, checking closure"""
    elems = tuple(sorted(set(int(x) for x in elements)))
    if not elems or any(x < 0 or x >= G.order for x in elems):
        raise InputError(f"Invalid element indices for a group of order {G.order}")
    members = set(elems)
    if G.identity not in members:
        raise InputError("Subset does not contain the identity")
    for x in elems:
        if G.inv(x) not in members:
            raise InputError(f"Subset not closed under inverses at {x}")
        for y in elems:
            if G.mul(x, y) not in members:
                raise InputError(f"Subset not closed under products at ({x}, {y})")
    return Subgroup(G, elems)


def _check_member(G: FiniteGroup, H: Subgroup) -> None:
    if H.parent is not G and H.parent != G:
        make_subgroup(G, H.elements)


def generate_subgroup(G: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    """Closure of a set of elements under the group law"""
    gens = list(dict.fromkeys(int(x) for x in elements))
    seen = {G.identity}
    queue = deque([G.identity])
    while queue:
        current = queue.popleft()
        for g in gens:
            nxt = G.mul(current, g)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Subgroup(G, tuple(sorted(seen)))


def subgroup_generators(H: Subgroup) -> List[int]:
    """Greedy generating set: keep an element when it is not in the closure of the previous ones"""
    G = H.parent
    gens: List[int] = []
    current = {G.identity}
    for x in H.elements:
        if x not in current:
            gens.append(x)
            current = set(generate_subgroup(G, gens).elements)
    return gens


def element_order(G: FiniteGroup, g: int) -> int:
    k, x = 1, g
    while x != G.identity:
        x = G.mul(x, g)
        k += 1
    return k


def all_subgroups(G: FiniteGroup) -> List[Subgroup]:
    """
    Every subgroup of G exactly once, sorted by (order, element tuple)

    Starts from the cyclic subgroups and keeps joining a known subgroup with one
    more element until no new subgroup appears.
    """
    found: Dict[Tuple[int, ...], List[int]] = {}
    frontier: List[Tuple[Tuple[int, ...], List[int]]] = []
    for g in G.elements():
        cyclic = generate_subgroup(G, [g]).elements
        if cyclic not in found:
            found[cyclic] = [g]
            frontier.append((cyclic, [g]))

    while frontier:
        new_frontier = []
        for elements, gens in frontier:
            members = set(elements)
            for g in G.elements():
                if g in members:
                    continue
                joined = generate_subgroup(G, gens + [g]).elements
                if joined not in found:
                    found[joined] = gens + [g]
                    new_frontier.append((joined, gens + [g]))
        frontier = new_frontier

    subgroups = [Subgroup(G, elements) for elements in sorted(found, key=lambda e: (len(e), e))]
    logger.debug(f"Group of order {G.order} has {len(subgroups)} subgroups")
    return subgroups


def conjugate_subgroup(G: FiniteGroup, g: int, H: Subgroup) -> Subgroup:
    """gHg^-1"""
    _check_member(G, H)
    if not 0 <= g < G.order:
        raise InputError(f"Element {g} is not in a group of order {G.order}")
    return Subgroup(G, tuple(sorted(G.conjugate(g, h) for h in H.elements)))


def is_normal(G: FiniteGroup, N: Subgroup) -> bool:
    gens = G.generators or tuple(G.elements())
    return all(G.conjugate(g, n) in N for g in gens for n in N.elements)


def quotient_with_projection(G: FiniteGroup, N: Subgroup) -> Tuple[FiniteGroup, GroupHom]:
    """
    G/N with cosets ordered by their smallest element, and the projection G -> G/N

    Args:
        G: the ambient group
        N: a normal subgroup

    Returns:
        (quotient group, projection homomorphism)
    """
    _check_member(G, N)
    if not is_normal(G, N):
        raise PreconditionError("Subgroup is not normal; the quotient is undefined")

    coset_of = [-1] * G.order
    representatives: List[int] = []
    for g in G.elements():
        if coset_of[g] >= 0:
            continue
        position = len(representatives)
        representatives.append(g)
        for n in N.elements:
            coset_of[G.mul(g, n)] = position

    table = [[coset_of[G.mul(a, b)] for b in representatives] for a in representatives]
    quotient = group_from_table(table, generators=tuple(dict.fromkeys(coset_of[g] for g in G.generators)))
    return quotient, GroupHom(G, quotient, tuple(coset_of))


def preimage_subgroup(pr: GroupHom, H: Subgroup) -> Subgroup:
    """{g in source : pr(g) in H}"""
    _check_member(pr.target, H)
    return Subgroup(pr.source, tuple(g for g in pr.source.elements() if pr.images[g] in H))


def opposite_group(G: FiniteGroup) -> FiniteGroup:
    """Same elements with table'(i, j) = table(j, i)"""
    table = tuple(tuple(G.table[j][i] for j in G.elements()) for i in G.elements())
    return FiniteGroup(order=G.order, table=table, identity=G.identity, inverses=G.inverses,
                       element_labels=G.element_labels, generators=G.generators)


def identity_hom(G: FiniteGroup) -> GroupHom:
    return GroupHom(G, G, tuple(G.elements()))


def inversion_hom(G: FiniteGroup) -> GroupHom:
    """g -> g^-1 as an isomorphism G -> G^op"""
    return GroupHom(G, opposite_group(G), G.inverses)


def is_cyclic(H: Subgroup) -> bool:
    return any(element_order(H.parent, h) == H.order for h in H.elements)


def _is_power_of(n: int, ell: int) -> bool:
    while n % ell == 0:
        n //= ell
    return n == 1


def require_prime(ell: int) -> int:
    if not isinstance(ell, int) or ell < 2 or not isprime(ell):
        raise InputError(f"{ell} is not a prime")
    return ell


def ell_core(G: FiniteGroup, H: Subgroup, ell: int) -> Subgroup:
    """
    O_ell(H): the largest normal ell-subgroup of H

    The product of two normal ell-subgroups is again one, so the normal
    ell-subgroup of largest order is the unique maximal one.
    """
    require_prime(ell)
    _check_member(G, H)
    lattice = lattice_of(G)
    h_index = lattice.index_of(H.elements)
    gens = subgroup_generators(H)
    best = lattice.trivial
    for k in lattice.subgroups_of(h_index):
        order = lattice.orders[k]
        if order <= lattice.orders[best] or not _is_power_of(order, ell):
            continue
        if all(lattice.conjugate(h, k) == k for h in gens):
            best = k
    return lattice.subgroups[best]


def coset_representatives(H: Subgroup, K: Subgroup) -> List[int]:
    """Smallest element of each left coset tK in H, increasing"""
    if not K.issubset(H):
        raise PreconditionError("K is not contained in H")
    G = H.parent
    seen = set()
    reps = []
    for t in H.elements:
        if t in seen:
            continue
        reps.append(t)
        seen.update(G.mul(t, k) for k in K.elements)
    return reps


def double_coset_reps(H: Subgroup, K: Subgroup, L: Subgroup) -> List[int]:
    """
    One representative per double coset KgL in H (the smallest element of each)

    Args:
        H: ambient subgroup
        K: left subgroup, contained in H
        L: right subgroup, contained in H

    Returns:
        Representatives in increasing order
    """
    if not K.issubset(H) or not L.issubset(H):
        raise PreconditionError("K and L must be contained in H")
    G = H.parent
    seen = set()
    reps = []
    for g in H.elements:
        if g in seen:
            continue
        reps.append(g)
        for k in K.elements:
            kg = G.mul(k, g)
            seen.update(G.mul(kg, l) for l in L.elements)
    return reps


class SubgroupLattice:
    """
    All subgroups of a group in the canonical order, with lookup tables for
    containment, intersection and conjugation
    """

    def __init__(self, group: FiniteGroup):
        self.group = group
        self.subgroups = all_subgroups(group)
        self.orders = [S.order for S in self.subgroups]
        self._index = {S.elements: i for i, S in enumerate(self.subgroups)}
        self._sets = [S.element_set for S in self.subgroups]
        self.trivial = 0
        self.whole = len(self.subgroups) - 1

        count = len(self.subgroups)
        self._contains = [[self._sets[j] <= self._sets[i] for j in range(count)] for i in range(count)]
        self._conjugate = [
            [self._index[tuple(sorted(group.conjugate(g, h) for h in S.elements))] for S in self.subgroups]
            for g in group.elements()
        ]
        self._intersections: Dict[Tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self.subgroups)

    def index_of(self, elements: Iterable[int]) -> int:
        key = tuple(sorted(set(elements)))
        if key not in self._index:
            raise InputError(f"{list(key)} is not a subgroup")
        return self._index[key]

    def contains(self, i: int, j: int) -> bool:
        """H_j <= H_i"""
        return self._contains[i][j]

    def subgroups_of(self, i: int) -> List[int]:
        return [j for j in range(len(self.subgroups)) if self._contains[i][j]]

    def conjugate(self, g: int, i: int) -> int:
        """Index of g H_i g^-1"""
        return self._conjugate[g][i]

    def intersection(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in self._intersections:
            self._intersections[key] = self._index[tuple(sorted(self._sets[i] & self._sets[j]))]
        return self._intersections[key]

    def index(self, i: int, j: int) -> int:
        """[H_i : H_j] for H_j <= H_i"""
        return self.orders[i] // self.orders[j]


@functools.lru_cache(maxsize=32)
def lattice_of(G: FiniteGroup) -> SubgroupLattice:
    return SubgroupLattice(G)
