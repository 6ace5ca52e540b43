"""
Cohomological Mackey functors in the subgroup encoding

A functor stores one abelian group per subgroup (lattice index) together with
restriction, corestriction and conjugation maps for every admissible pair.
The verifier checks every axiom as an exact identity of AbHom matrices and
records the first counterexample for each.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from mackey.abelian_snf import (
    AbHom,
    FinAbGroup,
    cokernel_of_hom,
    hom_add,
    hom_check_compose,
    hom_scale,
    identity_hom,
    is_isomorphism as hom_is_isomorphism,
    kernel_of_hom,
    preimage_element,
    zero_hom,
)
from mackey.errors import ContractError, PreconditionError
from mackey.group_core import (
    FiniteGroup,
    GroupHom,
    SubgroupLattice,
    double_coset_reps,
    lattice_of,
    opposite_group,
    preimage_subgroup,
)

logger = logging.getLogger(__name__)

PairMaps = Dict[Tuple[int, int], AbHom]


@dataclass(frozen=True)
class CohMackeyFunctor:
    """
    values[i] = M(H_i) for lattice index i
    res[(h, k)]: M(H_h) -> M(H_k) and cor[(h, k)]: M(H_k) -> M(H_h) for H_k <= H_h
    conj[(g, h)]: M(H_h) -> M(g H_h g^-1)
    """

    group: FiniteGroup
    values: Tuple[FinAbGroup, ...]
    res: PairMaps = field(repr=False)
    cor: PairMaps = field(repr=False)
    conj: PairMaps = field(repr=False)

    @property
    def lattice(self) -> SubgroupLattice:
        return lattice_of(self.group)

    def value_of(self, elements: Sequence[int]) -> FinAbGroup:
        return self.values[self.lattice.index_of(elements)]


@dataclass(frozen=True)
class MackeyMorphism:
    """components[i]: source.values[i] -> target.values[i]"""

    source: CohMackeyFunctor
    target: CohMackeyFunctor
    components: Tuple[AbHom, ...]


@dataclass
class AxiomCheck:
    name: str
    passed: bool = True
    checked: int = 0
    witness: Optional[dict] = None
    note: str = ""

    def record(self, ok: bool, witness: dict) -> None:
        self.checked += 1
        if not ok and self.passed:
            self.passed = False
            self.witness = witness

    def to_dict(self) -> dict:
        data = {"name": self.name, "passed": self.passed, "checked": self.checked, "witness": self.witness}
        if self.note:
            data["note"] = self.note
        return data


@dataclass
class AxiomReport:
    subject: str
    checks: List[AxiomCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> AxiomCheck:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {"subject": self.subject, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _expect(hom: Optional[AbHom], source: FinAbGroup, target: FinAbGroup, label: str) -> None:
    if hom is None:
        raise ContractError(f"Missing map {label}")
    if hom.source != source or hom.target != target:
        raise ContractError(f"Map {label} goes {hom.source} -> {hom.target}, expected {source} -> {target}")


def check_structure(M: CohMackeyFunctor) -> None:
    """Every map present with the declared source and target"""
    lattice = M.lattice
    if len(M.values) != len(lattice):
        raise ContractError(f"Functor has {len(M.values)} values for {len(lattice)} subgroups")
    for h in range(len(lattice)):
        for k in lattice.subgroups_of(h):
            _expect(M.res.get((h, k)), M.values[h], M.values[k], f"res[{h},{k}]")
            _expect(M.cor.get((h, k)), M.values[k], M.values[h], f"cor[{h},{k}]")
        for g in M.group.elements():
            _expect(M.conj.get((g, h)), M.values[h], M.values[lattice.conjugate(g, h)], f"conj[{g},{h}]")


def verify_cohomological_mackey(M: CohMackeyFunctor) -> AxiomReport:
    """
    Check the axioms of a cohomological Mackey functor

    (a) identities, (b) inner conjugations, (c) transitivity of res and cor,
    (d) conjugation composes, (e) conjugation commutes with res and cor,
    (f) the double-coset formula, (g) cor ∘ res = [H:K].
    Additivity holds by construction in the subgroup encoding.

    Raises:
        ContractError: if a map is missing or has the wrong source or target
    """
    check_structure(M)
    G, lattice = M.group, M.lattice
    n = len(lattice)
    compose = hom_check_compose

    a = AxiomCheck("identity")
    for h in range(n):
        ident = identity_hom(M.values[h])
        a.record(M.res[(h, h)] == ident, {"map": "res", "H": h})
        a.record(M.cor[(h, h)] == ident, {"map": "cor", "H": h})

    b = AxiomCheck("inner_conjugation")
    for h in range(n):
        ident = identity_hom(M.values[h])
        for x in lattice.subgroups[h].elements:
            b.record(M.conj[(x, h)] == ident, {"H": h, "element": x})

    c = AxiomCheck("transitivity")
    for h in range(n):
        for k in lattice.subgroups_of(h):
            for l in lattice.subgroups_of(k):
                c.record(compose(M.res[(k, l)], M.res[(h, k)]) == M.res[(h, l)],
                         {"map": "res", "H": h, "K": k, "L": l})
                c.record(compose(M.cor[(h, k)], M.cor[(k, l)]) == M.cor[(h, l)],
                         {"map": "cor", "H": h, "K": k, "L": l})

    d = AxiomCheck("conjugation_composition")
    for h in range(n):
        for x in G.elements():
            inner = M.conj[(x, h)]
            middle = lattice.conjugate(x, h)
            for g in G.elements():
                d.record(compose(M.conj[(g, middle)], inner) == M.conj[(G.mul(g, x), h)],
                         {"H": h, "g": g, "h": x})

    e = AxiomCheck("conjugation_compatibility")
    for g in G.elements():
        for h in range(n):
            gh = lattice.conjugate(g, h)
            for k in lattice.subgroups_of(h):
                gk = lattice.conjugate(g, k)
                e.record(compose(M.conj[(g, k)], M.res[(h, k)]) == compose(M.res[(gh, gk)], M.conj[(g, h)]),
                         {"map": "res", "g": g, "H": h, "K": k})
                e.record(compose(M.conj[(g, h)], M.cor[(h, k)]) == compose(M.cor[(gh, gk)], M.conj[(g, k)]),
                         {"map": "cor", "g": g, "H": h, "K": k})

    f = AxiomCheck("double_coset_formula")
    for h in range(n):
        H = lattice.subgroups[h]
        below = lattice.subgroups_of(h)
        for k in below:
            for l in below:
                lhs = compose(M.res[(h, k)], M.cor[(h, l)])
                rhs = zero_hom(M.values[l], M.values[k])
                for g in double_coset_reps(H, lattice.subgroups[k], lattice.subgroups[l]):
                    # J = L ∩ g^-1 K g, and g J g^-1 = K ∩ g L g^-1
                    j = lattice.intersection(l, lattice.conjugate(G.inv(g), k))
                    gj = lattice.conjugate(g, j)
                    term = compose(M.cor[(k, gj)], compose(M.conj[(g, j)], M.res[(l, j)]))
                    rhs = hom_add(rhs, term)
                f.record(lhs == rhs, {"H": h, "K": k, "L": l})

    cohomological = AxiomCheck("cohomological")
    for h in range(n):
        for k in lattice.subgroups_of(h):
            lhs = compose(M.cor[(h, k)], M.res[(h, k)])
            cohomological.record(lhs == hom_scale(identity_hom(M.values[h]), lattice.index(h, k)),
                                 {"H": h, "K": k, "index": lattice.index(h, k)})

    additivity = AxiomCheck("additivity", note="holds by construction in the subgroup encoding")
    report = AxiomReport("functor", [a, b, c, d, e, f, cohomological, additivity])
    for failure in report.failures:
        logger.warning(f"Axiom {failure.name} fails at {failure.witness}")
    return report


def check_morphism_structure(f: MackeyMorphism) -> None:
    if f.source.group != f.target.group:
        raise ContractError("Morphism between functors on different groups")
    if len(f.components) != len(f.source.values):
        raise ContractError(f"Morphism has {len(f.components)} components for {len(f.source.values)} subgroups")
    for i, comp in enumerate(f.components):
        _expect(comp, f.source.values[i], f.target.values[i], f"component[{i}]")


def verify_mackey_morphism(f: MackeyMorphism) -> AxiomReport:
    """Naturality of f with respect to res, cor and conj"""
    check_structure(f.source)
    check_structure(f.target)
    check_morphism_structure(f)
    S, T, phi = f.source, f.target, f.components
    lattice = S.lattice
    compose = hom_check_compose

    res = AxiomCheck("commutes_with_res")
    cor = AxiomCheck("commutes_with_cor")
    for h in range(len(lattice)):
        for k in lattice.subgroups_of(h):
            res.record(compose(phi[k], S.res[(h, k)]) == compose(T.res[(h, k)], phi[h]), {"H": h, "K": k})
            cor.record(compose(phi[h], S.cor[(h, k)]) == compose(T.cor[(h, k)], phi[k]), {"H": h, "K": k})

    conj = AxiomCheck("commutes_with_conj")
    for g in S.group.elements():
        for h in range(len(lattice)):
            gh = lattice.conjugate(g, h)
            conj.record(compose(phi[gh], S.conj[(g, h)]) == compose(T.conj[(g, h)], phi[h]), {"g": g, "H": h})

    report = AxiomReport("morphism", [res, cor, conj])
    for failure in report.failures:
        logger.warning(f"Morphism fails {failure.name} at {failure.witness}")
    return report


def identity_morphism(M: CohMackeyFunctor) -> MackeyMorphism:
    return MackeyMorphism(M, M, tuple(identity_hom(A) for A in M.values))


def zero_morphism(M: CohMackeyFunctor, N: CohMackeyFunctor) -> MackeyMorphism:
    return MackeyMorphism(M, N, tuple(zero_hom(A, B) for A, B in zip(M.values, N.values)))


def scalar_morphism(M: CohMackeyFunctor, k: int) -> MackeyMorphism:
    return MackeyMorphism(M, M, tuple(hom_scale(identity_hom(A), k) for A in M.values))


def compose_morphisms(f: MackeyMorphism, g: MackeyMorphism) -> MackeyMorphism:
    """f ∘ g"""
    return MackeyMorphism(g.source, f.target, tuple(hom_check_compose(a, b) for a, b in zip(f.components, g.components)))


def is_isomorphism(f: MackeyMorphism) -> bool:
    return all(hom_is_isomorphism(comp) for comp in f.components)


def zero_mackey(G: FiniteGroup) -> CohMackeyFunctor:
    """The functor with every value trivial"""
    lattice = lattice_of(G)
    zero = FinAbGroup()
    z = zero_hom(zero, zero)
    pairs = {(h, k): z for h in range(len(lattice)) for k in lattice.subgroups_of(h)}
    conj = {(g, h): z for g in G.elements() for h in range(len(lattice))}
    return CohMackeyFunctor(G, (zero,) * len(lattice), pairs, dict(pairs), conj)


def opposite_mackey(M: CohMackeyFunctor) -> CohMackeyFunctor:
    """
    The functor on G^op with the same values, res and cor, and c^op_{g,H} = c_{g^-1,H}

    Subgroups of G^op are the same sets as subgroups of G, so lattice indices carry over.
    """
    G = M.group
    conj = {(g, h): M.conj[(G.inv(g), h)] for (g, h) in M.conj}
    return CohMackeyFunctor(opposite_group(G), M.values, M.res, M.cor, conj)


def restrict_along_quotient(M: CohMackeyFunctor, pr: GroupHom) -> CohMackeyFunctor:
    """
    Pull M back along a surjection pr: G -> Q, so M_Q(H) = M(pr^-1(H))

    Conjugation by q uses the smallest lift; a second lift, when there is one,
    must give the same map.
    """
    if pr.source != M.group:
        raise PreconditionError("Projection does not start at the group of the functor")
    if not pr.is_surjective():
        raise PreconditionError("Projection is not surjective")
    Q = pr.target
    lattice_G = M.lattice
    lattice_Q = lattice_of(Q)
    pre = [lattice_G.index_of(preimage_subgroup(pr, S).elements) for S in lattice_Q.subgroups]

    lifts: Dict[int, List[int]] = {}
    for g in M.group.elements():
        lifts.setdefault(pr(g), []).append(g)

    values = tuple(M.values[pre[i]] for i in range(len(lattice_Q)))
    res, cor, conj = {}, {}, {}
    for h in range(len(lattice_Q)):
        for k in lattice_Q.subgroups_of(h):
            res[(h, k)] = M.res[(pre[h], pre[k])]
            cor[(h, k)] = M.cor[(pre[h], pre[k])]
    for q in Q.elements():
        first = lifts[q][0]
        second = lifts[q][1] if len(lifts[q]) > 1 else None
        for h in range(len(lattice_Q)):
            conj[(q, h)] = M.conj[(first, pre[h])]
            if second is not None and M.conj[(second, pre[h])] != conj[(q, h)]:
                raise ContractError(f"Conjugation by {q} depends on the lift ({first} vs {second}) at subgroup {h}")
    return CohMackeyFunctor(Q, values, res, cor, conj)


def quotient_restriction(M: CohMackeyFunctor, pr: GroupHom) -> CohMackeyFunctor:
    """Pull back along pr, then pass to the opposite functor"""
    return opposite_mackey(restrict_along_quotient(M, pr))


def _induce(M: CohMackeyFunctor, new_values: Sequence[FinAbGroup],
            into_old: Callable[[int, Sequence[int]], Sequence[int]],
            from_old: Callable[[int, Sequence[int]], Sequence[int]]) -> CohMackeyFunctor:
    """
    Transport the structure maps of M to a functor with values new_values

    into_old(i, x) sends an element of new_values[i] to M.values[i];
    from_old(i, y) brings an element of M.values[i] back.
    """
    lattice = M.lattice

    def induced(old: AbHom, src: int, tgt: int) -> AbHom:
        A, B = new_values[src], new_values[tgt]
        columns = [from_old(tgt, old(into_old(src, A.basis_vector(j)))) for j in range(A.ngens)]
        return AbHom.from_columns(A, B, columns)

    res, cor, conj = {}, {}, {}
    for h in range(len(lattice)):
        for k in lattice.subgroups_of(h):
            res[(h, k)] = induced(M.res[(h, k)], h, k)
            cor[(h, k)] = induced(M.cor[(h, k)], k, h)
    for (g, h), hom in M.conj.items():
        conj[(g, h)] = induced(hom, h, lattice.conjugate(g, h))
    return CohMackeyFunctor(M.group, tuple(new_values), res, cor, conj)


def kernel_mackey(f: MackeyMorphism) -> Tuple[CohMackeyFunctor, MackeyMorphism]:
    """Objectwise kernels of f with the inclusion morphism into f.source"""
    check_morphism_structure(f)
    pieces = [kernel_of_hom(comp) for comp in f.components]
    inclusions = [incl for _, incl in pieces]

    def back(i: int, y: Sequence[int]) -> Sequence[int]:
        x = preimage_element(inclusions[i], y)
        if x is None:
            raise ContractError(f"Structure map leaves the kernel at subgroup {i}")
        return x

    K = _induce(f.source, [group for group, _ in pieces], lambda i, x: inclusions[i](x), back)
    return K, MackeyMorphism(K, f.source, tuple(inclusions))


def _check_image_stable(f: MackeyMorphism, projections: Sequence[AbHom]) -> None:
    """Every structure map of f.target must send the image of f into the image of f"""
    M, N = f.source, f.target
    lattice = N.lattice
    maps = [("res", key, N.res[key], key[0], key[1]) for key in N.res]
    maps += [("cor", key, N.cor[key], key[1], key[0]) for key in N.cor]
    maps += [("conj", key, N.conj[key], key[1], lattice.conjugate(*key)) for key in N.conj]
    for name, key, hom, src, tgt in maps:
        for j in range(M.values[src].ngens):
            image = hom(f.components[src](M.values[src].basis_vector(j)))
            if any(projections[tgt](image)):
                raise ContractError(f"{name}{key} does not preserve the image of the morphism")


def cokernel_mackey(f: MackeyMorphism) -> Tuple[CohMackeyFunctor, MackeyMorphism]:
    """
    Objectwise cokernels of f with the projection morphism from f.target

    Raises:
        ContractError: if a structure map of f.target does not preserve the image of f
    """
    check_morphism_structure(f)
    pieces = [cokernel_of_hom(comp) for comp in f.components]
    projections = [proj for _, proj in pieces]
    _check_image_stable(f, projections)

    def lift(i: int, x: Sequence[int]) -> Sequence[int]:
        y = preimage_element(projections[i], x)
        if y is None:
            raise ContractError(f"Cokernel projection at subgroup {i} is not surjective")
        return y

    C = _induce(f.target, [group for group, _ in pieces], lift, lambda i, y: projections[i](y))
    return C, MackeyMorphism(f.target, C, tuple(projections))
