"""
Finite G-modules, their fixed-point Mackey functor and group cohomology

C^n_H is the group of H-equivariant maps X^(n+1) -> A, stored by its values
on the orbit representatives (r, x_1, ..., x_n) with r the smallest element
of H·x_0. H^n(H, A) is read off the small complex X = H. Restriction,
transfer and conjugation are literal operations on these maps, with
transfer and conjugation routed through the ambient complex X = G.
"""

import functools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mackey.abelian_snf import (
    AbHom,
    FinAbGroup,
    hom_add,
    hom_check_compose,
    hom_scale,
    identity_hom,
    is_isomorphism,
    joint_kernel,
    power,
    preimage_element,
)
from mackey.config import Config
from mackey.errors import ContractError, InputError, PreconditionError, SizeCapError
from mackey.group_core import (
    FiniteGroup,
    Subgroup,
    coset_representatives,
    lattice_of,
    make_subgroup,
    subgroup_generators,
)
from mackey.mackey_core import CohMackeyFunctor, MackeyMorphism
from mackey.modular import CocycleQuotient, working_dtype

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GModule:
    """A finite abelian group with a left G-action; action[g] is the map of element g"""

    group: FiniteGroup
    carrier: FinAbGroup
    action: Tuple[AbHom, ...]

    @functools.cached_property
    def action_array(self) -> np.ndarray:
        """act[g] as a (|G|, k, k) array"""
        k = self.carrier.ngens
        rows = [hom.matrix.to_rows() for hom in self.action]
        return np.array(rows, dtype=working_dtype(self.exponent)).reshape(self.group.order, k, k)

    @property
    def exponent(self) -> int:
        return self.carrier.exponent


def _as_hom(carrier: FinAbGroup, action) -> AbHom:
    if isinstance(action, AbHom):
        return action
    return AbHom.from_rows(carrier, carrier, action)


def gmodule_validate(group: FiniteGroup, carrier: FinAbGroup, generator_actions: Sequence) -> GModule:
    """
    Extend actions given on group.generators to every element and check the module axioms

    Args:
        group: the acting group
        carrier: a finite abelian group
        generator_actions: one AbHom or integer matrix per entry of group.generators

    Returns:
        The validated GModule

    Raises:
        ContractError: if an action is not invertible or the extension is not multiplicative
    """
    if not carrier.is_finite:
        raise InputError("The carrier of a G-module must be finite")
    if len(generator_actions) != len(group.generators):
        raise InputError(f"Got {len(generator_actions)} generator actions for {len(group.generators)} generators")
    homs = [_as_hom(carrier, a) for a in generator_actions]
    for i, hom in enumerate(homs):
        if hom.source != carrier or hom.target != carrier:
            raise ContractError(f"Action of generator {i} is not an endomorphism of the carrier")
        if not is_isomorphism(hom):
            raise ContractError(f"Action of generator {i} is not invertible")

    action: List[Optional[AbHom]] = [None] * group.order
    action[group.identity] = identity_hom(carrier)
    queue = deque([group.identity])
    while queue:
        g = queue.popleft()
        for s, hom in zip(group.generators, homs):
            gs = group.mul(g, s)
            candidate = hom_check_compose(action[g], hom)
            if action[gs] is None:
                action[gs] = candidate
                queue.append(gs)
            elif action[gs] != candidate:
                raise ContractError(f"Action is not multiplicative: two words for element {gs} act differently")
    if any(a is None for a in action):
        raise InputError("Generator list does not generate the group")

    for g in group.elements():
        for h in group.elements():
            if hom_check_compose(action[g], action[h]) != action[group.mul(g, h)]:
                raise ContractError(f"Action is not multiplicative at ({g}, {h})")
    return GModule(group, carrier, tuple(action))


def trivial_module(G: FiniteGroup, carrier: FinAbGroup) -> GModule:
    return gmodule_validate(G, carrier, [identity_hom(carrier)] * len(G.generators))


def _labels(G: FiniteGroup):
    if G.element_labels is None:
        raise PreconditionError("Group has no permutation labels")
    return G.element_labels


def permutation_module(G: FiniteGroup, modulus: int) -> GModule:
    """(Z/modulus)^degree with g sending e_i to e_g(i)"""
    labels = _labels(G)
    degree = len(labels[0])
    carrier = FinAbGroup((modulus,) * degree)
    actions = []
    for s in G.generators:
        perm = labels[s]
        actions.append([[int(perm[j] == i) for j in range(degree)] for i in range(degree)])
    return gmodule_validate(G, carrier, actions)


def _sign(perm: Sequence[int]) -> int:
    seen, cycles = set(), 0
    for start in range(len(perm)):
        if start in seen:
            continue
        cycles += 1
        x = start
        while x not in seen:
            seen.add(x)
            x = perm[x]
    return -1 if (len(perm) - cycles) % 2 else 1


def sign_module(G: FiniteGroup, modulus: int) -> GModule:
    """Z/modulus with odd permutations acting by -1"""
    labels = _labels(G)
    carrier = FinAbGroup.cyclic(modulus)
    return gmodule_validate(G, carrier, [[[_sign(labels[s])]] for s in G.generators])


def fixed_points(A: GModule, H: Subgroup) -> Tuple[FinAbGroup, AbHom]:
    """A^H as the joint kernel of action(h) - id over generators h of H"""
    ident = identity_hom(A.carrier)
    maps = [hom_add(A.action[h], hom_scale(ident, -1)) for h in subgroup_generators(H)]
    return joint_kernel(maps, source=A.carrier)


def fixed_point_mackey(A: GModule) -> CohMackeyFunctor:
    """
    H -> A^H with res the inclusion, cor^H_K(a) = Σ_{t in [H/K]} t·a and c_g(a) = g·a
    """
    G = A.group
    lattice = lattice_of(G)
    pieces = [fixed_points(A, S) for S in lattice.subgroups]
    values = tuple(group for group, _ in pieces)
    inclusions = [incl for _, incl in pieces]

    def induced(src: int, tgt: int, act) -> AbHom:
        columns = []
        for j in range(values[src].ngens):
            image = act(inclusions[src](values[src].basis_vector(j)))
            coords = preimage_element(inclusions[tgt], image)
            if coords is None:
                raise ContractError(f"Image leaves the fixed points of subgroup {tgt}")
            columns.append(coords)
        return AbHom.from_columns(values[src], values[tgt], columns)

    def trace(reps):
        def apply(x):
            total = A.carrier.zero()
            for t in reps:
                total = tuple(a + b for a, b in zip(total, A.action[t](x)))
            return A.carrier.reduce(total)
        return apply

    res, cor, conj = {}, {}, {}
    for h in range(len(lattice)):
        for k in lattice.subgroups_of(h):
            res[(h, k)] = induced(h, k, lambda x: x)
            reps = coset_representatives(lattice.subgroups[h], lattice.subgroups[k])
            cor[(h, k)] = induced(k, h, trace(reps))
    for g in G.elements():
        for h in range(len(lattice)):
            conj[(g, h)] = induced(h, lattice.conjugate(g, h), A.action[g])
    logger.info(f"Fixed-point functor on {len(lattice)} subgroups of a group of order {G.order}")
    return CohMackeyFunctor(G, values, res, cor, conj)


class OrbitChart:
    """
    Orbit bookkeeping of the free left H-action on X^(n+1), X an H-stable set of elements

    X is the whole group by default. With X = H itself there is a single orbit of
    first coordinates and the chart describes the small complex of H alone.
    The orbit of x has representative h·x where h·x_0 = min(H·x_0); its index is
    position(min(H·x_0))·|X|^n plus the base-|X| value of (h·x_1, ..., h·x_n).
    """

    def __init__(self, table: np.ndarray, H: Subgroup, alphabet: Optional[Sequence[int]] = None):
        order = table.shape[0]
        self.table = table
        self.alphabet = np.arange(order, dtype=np.int64) if alphabet is None else np.array(alphabet, dtype=np.int64)
        self.n = len(self.alphabet)
        self.digit = np.full(order, -1, dtype=np.int64)
        self.digit[self.alphabet] = np.arange(self.n)
        members = np.array(H.elements, dtype=np.int64)
        products = table[members][:, self.alphabet]
        best = np.argmin(products, axis=0)
        self.h_of = np.full(order, -1, dtype=np.int64)
        self.h_of[self.alphabet] = members[best]
        self.representatives0 = np.unique(products[best, np.arange(self.n)])
        self.position = np.full(order, -1, dtype=np.int64)
        self.position[self.representatives0] = np.arange(len(self.representatives0))

    def count(self, degree: int) -> int:
        return len(self.representatives0) * self.n ** degree

    def representatives(self, degree: int) -> np.ndarray:
        """Representative tuples, shape (count, degree + 1), in index order"""
        idx = np.arange(self.count(degree), dtype=np.int64)
        columns = []
        rest = idx % (self.n ** degree)
        for i in range(degree):
            columns.append(self.alphabet[(rest // self.n ** (degree - 1 - i)) % self.n])
        first = self.representatives0[idx // (self.n ** degree)]
        return np.stack([first] + columns, axis=1)

    def locate(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Orbit index of every row of X and the h with h·row = representative"""
        degree = X.shape[1] - 1
        h = self.h_of[X[:, 0]]
        Y = self.table[h[:, None], X]
        index = self.position[Y[:, 0]]
        for i in range(1, degree + 1):
            index = index * self.n + self.digit[Y[:, i]]
        return index, h


@dataclass
class Transport:
    """
    A cochain-level map: value(y) = Σ coef · act[u[y]] · f(src[y]) over its terms
    """

    source_count: int
    target_count: int
    terms: List[Tuple[int, np.ndarray, np.ndarray]]

    def apply(self, module: GModule, F: np.ndarray) -> np.ndarray:
        """F has shape (source_count, k, batch)"""
        act = module.action_array
        rel = np.array(module.carrier.invariant_factors, dtype=act.dtype)[None, :, None]
        F = np.asarray(F, dtype=act.dtype)
        out = np.zeros((self.target_count,) + F.shape[1:], dtype=act.dtype)
        for coef, u, src in self.terms:
            out = (out + coef * np.matmul(act[u], F[src])) % rel
        return out

    def to_dense(self, module: GModule) -> np.ndarray:
        """The map as an integer matrix on orbit-major coordinates"""
        act = module.action_array
        k = module.carrier.ngens
        blocks = np.zeros((self.target_count, self.source_count, k, k), dtype=act.dtype)
        for coef, u, src in self.terms:
            np.add.at(blocks, (np.arange(self.target_count), src), coef * act[u])
        return blocks.transpose(0, 2, 1, 3).reshape(self.target_count * k, self.source_count * k)


def _table(G: FiniteGroup) -> np.ndarray:
    return np.array(G.table, dtype=np.int64)


def restriction_transport(G: FiniteGroup, chart_H: OrbitChart, chart_K: OrbitChart, degree: int) -> Transport:
    inv = np.array(G.inverses, dtype=np.int64)
    idx, h = chart_H.locate(chart_K.representatives(degree))
    return Transport(chart_H.count(degree), chart_K.count(degree), [(1, inv[h], idx)])


def corestriction_transport(G: FiniteGroup, H: Subgroup, K: Subgroup, chart_H: OrbitChart,
                            chart_K: OrbitChart, degree: int) -> Transport:
    """(cor f)(y) = Σ_{t in [H/K]} t·f(t^-1·y)"""
    T = _table(G)
    inv = np.array(G.inverses, dtype=np.int64)
    targets = chart_H.representatives(degree)
    terms = []
    for t in coset_representatives(H, K):
        idx, k = chart_K.locate(T[inv[t], targets])
        terms.append((1, T[t, inv[k]], idx))
    return Transport(chart_K.count(degree), chart_H.count(degree), terms)


def conjugation_transport(G: FiniteGroup, g: int, chart_H: OrbitChart, chart_gH: OrbitChart,
                          degree: int) -> Transport:
    """(c_g f)(y) = g·f(g^-1·y)"""
    T = _table(G)
    inv = np.array(G.inverses, dtype=np.int64)
    idx, h = chart_H.locate(T[inv[g], chart_gH.representatives(degree)])
    return Transport(chart_H.count(degree), chart_gH.count(degree), [(1, T[g, inv[h]], idx)])


def section_transport(G: FiniteGroup, chart_small: OrbitChart, chart_big: OrbitChart, degree: int) -> Transport:
    """
    Pull a cochain on H^(n+1) back to G^(n+1) along x -> s(x), s(x) = h_of(x)^-1

    s is H-equivariant and fixes H pointwise, so restricting the pullback to
    H^(n+1) gives the cochain back and both complexes have the same cohomology.
    """
    inv = np.array(G.inverses, dtype=np.int64)
    X = chart_big.representatives(degree)
    idx, h = chart_small.locate(inv[chart_big.h_of[X]])
    return Transport(chart_small.count(degree), chart_big.count(degree), [(1, inv[h], idx)])


def boundary_transport(G: FiniteGroup, chart: OrbitChart, degree: int) -> Transport:
    """(df)(x_0..x_{n+1}) = Σ_i (-1)^i f(x_0..x̂_i..x_{n+1})"""
    inv = np.array(G.inverses, dtype=np.int64)
    targets = chart.representatives(degree + 1)
    terms = []
    for i in range(degree + 2):
        idx, h = chart.locate(np.delete(targets, i, axis=1))
        terms.append(((-1) ** i, inv[h], idx))
    return Transport(chart.count(degree), chart.count(degree + 1), terms)


def _check_complex_size(size: int, what: str, cap: Optional[int]) -> None:
    cap = cap if cap is not None else Config.COMPLEX_SIZE_CAP
    if size > cap:
        raise SizeCapError(f"{what} needs {size} coordinates, cap is {cap}", dimension=size, cap=cap)


class EquivariantCochainComplex:
    """C^0_H -> C^1_H -> ... -> C^n_max_H for one subgroup H"""

    def __init__(self, G: FiniteGroup, H: Subgroup, module: GModule, n_max: int, chart: OrbitChart):
        self.group = G
        self.subgroup = H
        self.module = module
        self.n_max = n_max
        self.chart = chart
        self._boundaries: Dict[int, np.ndarray] = {}

    def dimension(self, n: int) -> int:
        """Number of orbit coordinates, each a copy of the carrier"""
        return self.chart.count(n)

    def cochain_group(self, n: int) -> FinAbGroup:
        return power(self.module.carrier, self.dimension(n))

    def relations(self, n: int) -> np.ndarray:
        factors = np.array(self.module.carrier.invariant_factors, dtype=working_dtype(self.module.exponent))
        return np.tile(factors, self.dimension(n))

    def boundary_transport(self, n: int) -> Transport:
        return boundary_transport(self.group, self.chart, n)

    def boundary(self, n: int) -> np.ndarray:
        """d^n as a dense matrix on orbit-major coordinates"""
        if not 0 <= n < self.n_max:
            raise InputError(f"Boundary d^{n} is outside degrees 0..{self.n_max - 1}")
        if n not in self._boundaries:
            self._boundaries[n] = self.boundary_transport(n).to_dense(self.module)
        return self._boundaries[n]

    def _canonical_order(self, n: int) -> np.ndarray:
        # carrier-major order, so the tiled relations form a divisibility chain
        k = self.module.carrier.ngens
        N = self.dimension(n)
        return np.arange(N * k).reshape(N, k).T.reshape(-1)

    def boundary_hom(self, n: int) -> AbHom:
        """d^n as an AbHom between the cochain groups in canonical coordinates"""
        d = self.boundary(n)
        rows, cols = self._canonical_order(n + 1), self._canonical_order(n)
        return AbHom.from_rows(self.cochain_group(n), self.cochain_group(n + 1), d[np.ix_(rows, cols)].tolist())

    def verify(self) -> None:
        for n in range(self.n_max - 1):
            product = self.boundary(n + 1) @ self.boundary(n) % self.relations(n + 2)[:, None]
            if np.any(product):
                raise ContractError(f"d^{n + 1} ∘ d^{n} is nonzero")

    def cocycle_quotient(self, n: int) -> CocycleQuotient:
        if not 0 <= n < self.n_max:
            raise InputError(f"Cohomology degree {n} needs 0 <= n < {self.n_max}")
        d_in = self.boundary(n - 1) if n > 0 else None
        return CocycleQuotient(d_in, self.boundary(n), self.relations(n), self.relations(n + 1),
                               self.module.exponent)


def cochain_complex(G: FiniteGroup, H: Subgroup, A: GModule, n_max: int = 3,
                    cap: Optional[int] = None) -> EquivariantCochainComplex:
    """
    The H-equivariant cochain complex on G^(n+1) with coefficients in A, degrees 0..n_max

    Raises:
        SizeCapError: when |G|^(n_max+1) times the rank of the carrier exceeds the complex cap
    """
    if A.group != G:
        raise InputError("Module is not a module over this group")
    make_subgroup(G, H.elements)
    _check_complex_size(G.order ** (n_max + 1) * max(A.carrier.ngens, 1),
                        f"Cochain complex up to degree {n_max}", cap)
    complex_ = EquivariantCochainComplex(G, H, A, n_max, OrbitChart(_table(G), H))
    complex_.verify()
    logger.debug(f"Cochain complex for a subgroup of order {H.order}: dimensions "
                 f"{[complex_.dimension(n) for n in range(n_max + 1)]}")
    return complex_


def cohomology_group(complex_: EquivariantCochainComplex, n: int) -> FinAbGroup:
    """ker d^n / im d^(n-1)"""
    return complex_.cocycle_quotient(n).group


def _orbit_major(F: np.ndarray, count: int, k: int) -> np.ndarray:
    return F.reshape(count, k, -1)


def subgroup_chart(G: FiniteGroup, H: Subgroup) -> OrbitChart:
    """Chart of the small complex of H: H-equivariant cochains on H^(n+1)"""
    return OrbitChart(_table(G), H, alphabet=H.elements)


def cohomology_mackey(G: FiniteGroup, A: GModule, n: int, cap: Optional[int] = None) -> CohMackeyFunctor:
    """
    H -> H^n(H, A) with res, cor and conj induced by the cochain-level maps

    Each H^n(H, A) is computed on the small complex of H (|H|^n orbit coordinates
    in degree n). Restriction stays inside the small complexes; transfer and
    conjugation pass through the complex on G^(n+1) via section_transport.

    Args:
        G: the group
        A: a finite G-module
        n: degree, 0, 1 or 2
        cap: complex cap override

    Raises:
        SizeCapError: when |G|^(n+2), or |G|^(n+1) times the rank of the carrier,
            exceeds the complex cap
    """
    if n not in (0, 1, 2):
        raise InputError(f"Cohomology degree must be 0, 1 or 2, got {n}")
    if A.group != G:
        raise InputError("Module is not a module over this group")
    k = A.carrier.ngens
    _check_complex_size(G.order ** (n + 2), f"Degree {n} cohomology of a group of order {G.order}", cap)
    _check_complex_size(G.order ** (n + 1) * k, f"Ambient degree {n} cochains with a carrier of rank {k}", cap)

    lattice = lattice_of(G)
    table = _table(G)
    small = [subgroup_chart(G, S) for S in lattice.subgroups]
    big = [OrbitChart(table, S) for S in lattice.subgroups]
    quotients = []
    for S, chart in zip(lattice.subgroups, small):
        complex_ = EquivariantCochainComplex(G, S, A, n + 1, chart)
        quotients.append(complex_.cocycle_quotient(n))
    values = tuple(q.group for q in quotients)
    logger.info(f"H^{n} over {len(lattice)} subgroups: {[str(v) for v in values]}")

    def induced(transports: Sequence[Transport], src: int, tgt: int) -> AbHom:
        gens = quotients[src].generators
        if gens.shape[1] == 0:
            return AbHom.from_columns(values[src], values[tgt], [])
        F = _orbit_major(gens, small[src].count(n), k)
        for transport in transports:
            F = transport.apply(A, F)
        coords = quotients[tgt].coordinates(F.reshape(small[tgt].count(n) * k, -1))
        return AbHom.from_columns(values[src], values[tgt], coords.T.tolist())

    lifts = [section_transport(G, s, b, n) for s, b in zip(small, big)]
    res, cor, conj = {}, {}, {}
    for h in range(len(lattice)):
        for j in lattice.subgroups_of(h):
            res[(h, j)] = induced([restriction_transport(G, small[h], small[j], n)], h, j)
            H, J = lattice.subgroups[h], lattice.subgroups[j]
            cor[(h, j)] = induced([lifts[j], corestriction_transport(G, H, J, small[h], big[j], n)], j, h)
    for g in G.elements():
        for h in range(len(lattice)):
            gh = lattice.conjugate(g, h)
            conj[(g, h)] = induced([lifts[h], conjugation_transport(G, g, big[h], small[gh], n)], h, gh)
    return CohMackeyFunctor(G, values, res, cor, conj)


def degree_zero_comparison(A: GModule, cap: Optional[int] = None) -> MackeyMorphism:
    """
    fixed_point_mackey(A) -> cohomology_mackey(G, A, 0), sending a in A^H to the constant cochain
    """
    G = A.group
    lattice = lattice_of(G)
    fixed = fixed_point_mackey(A)
    degree_zero = cohomology_mackey(G, A, 0, cap=cap)
    dtype = working_dtype(A.exponent)
    components = []
    for i, S in enumerate(lattice.subgroups):
        _, inclusion = fixed_points(A, S)
        chart = subgroup_chart(G, S)
        quotient = EquivariantCochainComplex(G, S, A, 1, chart).cocycle_quotient(0)
        columns = []
        for j in range(fixed.values[i].ngens):
            a = np.array(inclusion(fixed.values[i].basis_vector(j)), dtype=dtype)
            constant = np.tile(a, chart.count(0))[:, None]
            columns.append([int(x) for x in quotient.coordinates(constant)[:, 0]])
        components.append(AbHom.from_columns(fixed.values[i], degree_zero.values[i], columns))
    return MackeyMorphism(fixed, degree_zero, tuple(components))
