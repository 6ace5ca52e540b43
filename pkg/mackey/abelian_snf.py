"""
Exact integer linear algebra for finitely generated abelian groups

Smith normal form with tracked unimodular transforms, abelian groups in
invariant-factor form, homomorphisms as integer matrices against the canonical
generators, and the kernels, cokernels, images and primary parts built on top.
Everything here uses Python integers, so no entry ever overflows.
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import factorint, isprime

from mackey.errors import ContractError, InputError, PreconditionError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Integer matrix with entries stored row-major"""

    rows: int
    cols: int
    entries: Tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise InputError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        for i, r in enumerate(rows):
            if len(r) != width:
                raise InputError(f"Row {i} has {len(r)} entries, expected {width}")
        return cls(len(rows), width, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls.from_rows([[col[i] for col in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([list(self.column(j)) for j in range(self.cols)], cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InputError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = [other.column(j) for j in range(other.cols)]
        return IntMatrix(self.rows, other.cols, tuple(
            sum(a * b for a, b in zip(self.row(i), col)) for i in range(self.rows) for col in cols
        ))

    def apply(self, vector: Sequence[int]) -> Vector:
        return tuple(sum(a * b for a, b in zip(self.row(i), vector)) for i in range(self.rows))

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))


class _Smith:
    """
    Working state of a Smith normal form computation, D = U·A·V

    U_inv is kept in step with U so that presentations can read generators
    off its columns without a second inversion.
    """

    def __init__(self, rows: Sequence[Sequence[int]], r: int, c: int):
        self.r, self.c = r, c
        self.D = [list(row) for row in rows]
        self.U = [[int(i == j) for j in range(r)] for i in range(r)]
        self.U_inv = [[int(i == j) for j in range(r)] for i in range(r)]
        self.V = [[int(i == j) for j in range(c)] for i in range(c)]
        self.rank = 0
        self._run()

    def _row_sub(self, target: int, source: int, q: int) -> None:
        # row_target -= q * row_source
        if q == 0:
            return
        for M in (self.D, self.U):
            rt, rs = M[target], M[source]
            for k in range(len(rt)):
                rt[k] -= q * rs[k]
        for row in self.U_inv:
            row[source] += q * row[target]

    def _row_swap(self, a: int, b: int) -> None:
        if a == b:
            return
        for M in (self.D, self.U):
            M[a], M[b] = M[b], M[a]
        for row in self.U_inv:
            row[a], row[b] = row[b], row[a]

    def _row_negate(self, a: int) -> None:
        for M in (self.D, self.U):
            M[a] = [-x for x in M[a]]
        for row in self.U_inv:
            row[a] = -row[a]

    def _col_sub(self, target: int, source: int, q: int) -> None:
        # col_target -= q * col_source
        if q == 0:
            return
        for M in (self.D, self.V):
            for row in M:
                row[target] -= q * row[source]

    def _col_swap(self, a: int, b: int) -> None:
        if a == b:
            return
        for M in (self.D, self.V):
            for row in M:
                row[a], row[b] = row[b], row[a]

    def _smallest(self, t: int, rows: Iterable[int], cols: Iterable[int]) -> Optional[Tuple[int, int]]:
        best = None
        cols = list(cols)
        for i in rows:
            for j in cols:
                x = self.D[i][j]
                if x and (best is None or abs(x) < abs(self.D[best[0]][best[1]])):
                    best = (i, j)
        return best

    def _run(self) -> None:
        D, r, c = self.D, self.r, self.c
        for t in range(min(r, c)):
            pivot = self._smallest(t, range(t, r), range(t, c))
            if pivot is None:
                break
            self._row_swap(t, pivot[0])
            self._col_swap(t, pivot[1])
            while True:
                p = D[t][t]
                for i in range(t + 1, r):
                    self._row_sub(i, t, D[i][t] // p)
                for j in range(t + 1, c):
                    self._col_sub(j, t, D[t][j] // p)

                leftover = self._smallest(t, range(t + 1, r), [t]) or self._smallest(t, [t], range(t + 1, c))
                if leftover is not None:
                    self._row_swap(t, leftover[0])
                    self._col_swap(t, leftover[1])
                    continue

                bad_row = next((i for i in range(t + 1, r)
                                if any(D[i][j] % p for j in range(t + 1, c))), None)
                if bad_row is None:
                    break
                # row_t += row_bad brings a non-multiple into row t
                self._row_sub(t, bad_row, -1)

            if D[t][t] < 0:
                self._row_negate(t)
            self.rank = t + 1

    def diagonal(self, length: int) -> List[int]:
        """Diagonal padded with zeros to the given length"""
        return [self.D[i][i] if i < min(self.r, self.c) else 0 for i in range(length)]


def smith_normal_form(A: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Smith normal form D = U·A·V

    Args:
        A: integer matrix of any shape

    Returns:
        (U, D, V) with U and V unimodular and D diagonal, d_1 | d_2 | ..., d_i >= 0
    """
    s = _Smith(A.to_rows(), A.rows, A.cols)
    return (IntMatrix.from_rows(s.U, cols=A.rows),
            IntMatrix.from_rows(s.D, cols=A.cols),
            IntMatrix.from_rows(s.V, cols=A.cols))


@dataclass(frozen=True)
class FinAbGroup:
    """
    Finitely generated abelian group Z/d_1 + ... + Z/d_k + Z^r

    Generators are ordered torsion first (ascending d_i), then free.
    """

    invariant_factors: Tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", factors)
        if any(d < 2 for d in factors):
            raise InputError(f"Invariant factors must be at least 2: {factors}")
        if any(b % a for a, b in zip(factors, factors[1:])):
            raise InputError(f"Invariant factors must form a divisibility chain: {factors}")
        if self.free_rank < 0:
            raise InputError("Free rank cannot be negative")

    @classmethod
    def cyclic(cls, n: int) -> "FinAbGroup":
        """Z/n, with n = 0 meaning Z"""
        if n == 0:
            return cls((), 1)
        return cls((abs(n),) if abs(n) > 1 else ())

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def relation_orders(self) -> Tuple[int, ...]:
        return self.invariant_factors + (0,) * self.free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise PreconditionError("Infinite group has no finite order")
        return functools.reduce(lambda a, b: a * b, self.invariant_factors, 1)

    @property
    def exponent(self) -> int:
        if not self.is_finite:
            raise PreconditionError("Infinite group has no finite exponent")
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def reduce(self, vector: Sequence[int]) -> Vector:
        if len(vector) != self.ngens:
            raise InputError(f"Vector of length {len(vector)} for a group with {self.ngens} generators")
        return tuple(int(x) % d if d else int(x) for x, d in zip(vector, self.relation_orders))

    def elements(self):
        """Every element as a coordinate vector (finite groups only)"""
        if not self.is_finite:
            raise PreconditionError("Cannot enumerate an infinite group")
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def basis_vector(self, i: int) -> Vector:
        return tuple(int(k == i) for k in range(self.ngens))

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors), "free_rank": self.free_rank}


def _reduce_rows(rows: List[List[int]], relations: Sequence[int]) -> List[List[int]]:
    return [[x % d if d else x for x in row] for row, d in zip(rows, relations)]


@dataclass(frozen=True)
class AbHom:
    """
    Homomorphism source -> target, column i = image of source generator i

    Entries are stored reduced modulo the relation order of their row, so two
    homomorphisms are equal exactly when their dataclasses compare equal.
    """

    source: FinAbGroup
    target: FinAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        s, t, m = self.source, self.target, self.matrix
        if m.rows != t.ngens or m.cols != s.ngens:
            raise ContractError(f"Matrix is {m.rows}x{m.cols}, expected {t.ngens}x{s.ngens}")
        rows = _reduce_rows(m.to_rows(), t.relation_orders)
        object.__setattr__(self, "matrix", IntMatrix.from_rows(rows, cols=m.cols))
        for i, d in enumerate(s.relation_orders):
            if d == 0:
                continue
            image = t.reduce([d * x for x in self.matrix.column(i)])
            if any(image):
                raise ContractError(f"Not well-defined: {d} times the image of source generator {i} is nonzero")

    @classmethod
    def from_rows(cls, source: FinAbGroup, target: FinAbGroup, rows: Sequence[Sequence[int]]) -> "AbHom":
        return cls(source, target, IntMatrix.from_rows(rows, cols=source.ngens))

    @classmethod
    def from_columns(cls, source: FinAbGroup, target: FinAbGroup, columns: Sequence[Sequence[int]]) -> "AbHom":
        return cls(source, target, IntMatrix.from_columns(columns, rows=target.ngens))

    def __call__(self, vector: Sequence[int]) -> Vector:
        return self.target.reduce(self.matrix.apply(self.source.reduce(vector)))

    @functools.cached_property
    def _system(self) -> "_LinearSystem":
        return _LinearSystem(self.matrix.to_rows(), self.target.relation_orders, self.source.ngens)


def identity_hom(A: FinAbGroup) -> AbHom:
    return AbHom(A, A, IntMatrix.identity(A.ngens))


def zero_hom(A: FinAbGroup, B: FinAbGroup) -> AbHom:
    return AbHom(A, B, IntMatrix.zeros(B.ngens, A.ngens))


def hom_check_compose(f: AbHom, g: AbHom) -> AbHom:
    """
    f ∘ g, with the composite re-validated

    Raises:
        ContractError: if g's target is not f's source or the composite is ill-defined
    """
    if g.target != f.source:
        raise ContractError(f"Cannot compose: target {g.target} of the inner map is not source {f.source} of the outer map")
    return AbHom(g.source, f.target, f.matrix @ g.matrix)


def hom_add(f: AbHom, g: AbHom) -> AbHom:
    if f.source != g.source or f.target != g.target:
        raise ContractError("Cannot add homomorphisms with different source or target")
    return AbHom(f.source, f.target, IntMatrix(f.matrix.rows, f.matrix.cols,
                                               tuple(a + b for a, b in zip(f.matrix.entries, g.matrix.entries))))


def hom_scale(f: AbHom, k: int) -> AbHom:
    return AbHom(f.source, f.target, IntMatrix(f.matrix.rows, f.matrix.cols,
                                               tuple(k * a for a in f.matrix.entries)))


def hom_equal(f: AbHom, g: AbHom) -> bool:
    return f == g


class _LinearSystem:
    """
    Solves F x + diag(rel) w = y over the integers and exposes the kernel of
    [F | diag(rel)]. Free rows carry relation 0, so they impose exact equality.
    """

    def __init__(self, F: Sequence[Sequence[int]], relations: Sequence[int], unknowns: int):
        self.n = len(relations)
        self.s = unknowns
        rows = [list(F[i]) + [relations[i] if j == i else 0 for j in range(self.n)] for i in range(self.n)]
        self.width = self.s + self.n
        self.smith = _Smith(rows, self.n, self.width)

    def kernel_basis(self) -> List[List[int]]:
        V = self.smith.V
        return [[V[i][j] for i in range(self.width)] for j in range(self.smith.rank, self.width)]

    def solve(self, y: Sequence[int]) -> Optional[List[int]]:
        """Some x with F x ≡ y modulo the relations, or None"""
        sm = self.smith
        u = [sum(a * b for a, b in zip(row, y)) for row in sm.U]
        z = [0] * self.width
        for i in range(self.n):
            d = sm.D[i][i] if i < sm.rank else 0
            if d == 0:
                if u[i] != 0:
                    return None
            elif u[i] % d:
                return None
            else:
                z[i] = u[i] // d
        x = [sum(sm.V[k][j] * z[j] for j in range(self.width)) for k in range(self.s)]
        return x


class _Presentation:
    """
    The subgroup of Z^n / diag(rel) generated by the given vectors, in canonical form

    group: the subgroup as a FinAbGroup
    generators: canonical generators as ambient vectors
    """

    def __init__(self, gens: Sequence[Sequence[int]], relations: Sequence[int]):
        self.relations = list(relations)
        n, s = len(relations), len(gens)
        columns = [list(g) for g in gens]
        F = [[columns[j][i] for j in range(s)] for i in range(n)]
        self.system = _LinearSystem(F, relations, s)

        rel_vectors = [v[:s] for v in self.system.kernel_basis()]
        R = [[v[i] for v in rel_vectors] for i in range(s)]
        self.smith = _Smith(R, s, len(rel_vectors))
        diag = self.smith.diagonal(s)
        self.kept = [i for i in range(s) if diag[i] != 1]
        self.moduli = [diag[i] for i in self.kept]
        self.group = FinAbGroup(tuple(d for d in self.moduli if d), sum(1 for d in self.moduli if d == 0))

        U_inv = self.smith.U_inv
        self.generators = [
            tuple((sum(columns[j][k] * U_inv[j][i] for j in range(s)) % r) if r else
                  sum(columns[j][k] * U_inv[j][i] for j in range(s))
                  for k, r in enumerate(relations))
            for i in self.kept
        ]

    def coordinates(self, y: Sequence[int]) -> Optional[Vector]:
        """Canonical coordinates of an ambient element, None when it is not in the subgroup"""
        c = self.system.solve(y)
        if c is None:
            return None
        U = self.smith.U
        return tuple(
            (sum(a * b for a, b in zip(U[i], c)) % d) if d else sum(a * b for a, b in zip(U[i], c))
            for i, d in zip(self.kept, self.moduli)
        )

    def inclusion_columns(self) -> List[Vector]:
        return self.generators


def fin_ab_from_relations(generators: int, relations: IntMatrix) -> FinAbGroup:
    """
    Cokernel of a relation matrix, one relation per row

    Args:
        generators: number of generators; relations must have this many columns
        relations: integer matrix whose rows are relations

    Returns:
        The presented group in invariant-factor form
    """
    if relations.cols != generators and relations.rows:
        raise InputError(f"Relation matrix has {relations.cols} columns for {generators} generators")
    s = _Smith(relations.to_rows(), relations.rows, generators)
    diag = s.diagonal(generators)
    return FinAbGroup(tuple(d for d in diag if d > 1), sum(1 for d in diag if d == 0))


def direct_sum(groups: Iterable[FinAbGroup]) -> FinAbGroup:
    """Invariant-factor form of a direct sum, recombining prime-power parts"""
    groups = list(groups)
    exponents = {}
    for A in groups:
        for d in A.invariant_factors:
            for p, e in factorint(d).items():
                exponents.setdefault(p, []).append(e)
    length = max((len(v) for v in exponents.values()), default=0)
    factors = [1] * length
    for p, es in exponents.items():
        for k, e in enumerate(sorted(es, reverse=True)):
            factors[k] *= p ** e
    return FinAbGroup(tuple(sorted(factors)), sum(A.free_rank for A in groups))


def power(A: FinAbGroup, k: int) -> FinAbGroup:
    """Direct sum of k copies of A"""
    return FinAbGroup(tuple(sorted(A.invariant_factors * k)), A.free_rank * k)


def is_isomorphic(A: FinAbGroup, B: FinAbGroup) -> bool:
    return A.invariant_factors == B.invariant_factors and A.free_rank == B.free_rank


def _require_prime(ell: int) -> None:
    if not isinstance(ell, int) or ell < 2 or not isprime(ell):
        raise InputError(f"{ell} is not a prime")


def _valuation(n: int, ell: int) -> int:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def ell_primary_part(A: FinAbGroup, ell: int) -> FinAbGroup:
    """A(ℓ): the ℓ-power parts of the invariant factors; the free part contributes nothing"""
    _require_prime(ell)
    parts = [ell ** _valuation(d, ell) for d in A.invariant_factors]
    return FinAbGroup(tuple(p for p in parts if p > 1))


INVARIANT_NAMES = ("ell_rank", "ell_length", "length")


@dataclass(frozen=True)
class AdditiveInvariant:
    """An additive invariant of finite abelian groups"""

    name: str
    ell: Optional[int] = None

    def __post_init__(self):
        if self.name not in INVARIANT_NAMES:
            raise InputError(f"Unknown invariant {self.name!r}; choose from {', '.join(INVARIANT_NAMES)}")
        if self.name != "length":
            if self.ell is None:
                raise InputError(f"Invariant {self.name} needs a prime")
            _require_prime(self.ell)

    @property
    def label(self) -> str:
        return self.name if self.ell is None else f"{self.name}({self.ell})"

    def __call__(self, A: FinAbGroup) -> int:
        return evaluate_invariant(self, A)


def evaluate_invariant(m: AdditiveInvariant, A: FinAbGroup) -> int:
    if not A.is_finite:
        raise PreconditionError(f"Invariant {m.label} is only defined on finite groups, got {A}")
    if m.name == "ell_rank":
        return sum(1 for d in A.invariant_factors if d % m.ell == 0)
    if m.name == "ell_length":
        return sum(_valuation(d, m.ell) for d in A.invariant_factors)
    return sum(sum(factorint(d).values()) for d in A.invariant_factors)


def registered_invariants(primes: Iterable[int] = ()) -> List[AdditiveInvariant]:
    invariants = []
    for ell in sorted(set(primes)):
        invariants.append(AdditiveInvariant("ell_rank", ell))
        invariants.append(AdditiveInvariant("ell_length", ell))
    invariants.append(AdditiveInvariant("length"))
    return invariants


def joint_kernel(homs: Sequence[AbHom], source: Optional[FinAbGroup] = None) -> Tuple[FinAbGroup, AbHom]:
    """
    Common kernel of several homomorphisms out of one group, with its inclusion

    The stacked target need not be in canonical form: each block keeps its own
    relation orders.
    """
    if source is None:
        if not homs:
            raise InputError("joint_kernel needs a source when no maps are given")
        source = homs[0].source
    F: List[List[int]] = []
    relations: List[int] = []
    for f in homs:
        if f.source != source:
            raise ContractError("All maps in a joint kernel must share their source")
        F.extend(f.matrix.to_rows())
        relations.extend(f.target.relation_orders)

    system = _LinearSystem(F, relations, source.ngens)
    gens = [source.reduce(v[:source.ngens]) for v in system.kernel_basis()]
    presentation = _Presentation(gens, source.relation_orders)
    inclusion = AbHom.from_columns(presentation.group, source, presentation.generators)
    return presentation.group, inclusion


def kernel_of_hom(f: AbHom) -> Tuple[FinAbGroup, AbHom]:
    """Kernel of f with its inclusion into f.source"""
    return joint_kernel([f])


def cokernel_of_hom(f: AbHom) -> Tuple[FinAbGroup, AbHom]:
    """
    Cokernel of f with the projection from f.target

    Returns:
        (cokernel group, surjective projection with projection ∘ f = 0)
    """
    system = f._system
    sm = system.smith
    diag = sm.diagonal(system.n)
    kept = [i for i in range(system.n) if diag[i] != 1]
    moduli = [diag[i] for i in kept]
    group = FinAbGroup(tuple(d for d in moduli if d), sum(1 for d in moduli if d == 0))
    projection = AbHom.from_rows(f.target, group, [sm.U[i] for i in kept])
    return group, projection


def image_of_hom(f: AbHom) -> Tuple[FinAbGroup, AbHom]:
    """Image of f with its inclusion into f.target"""
    columns = [f.matrix.column(j) for j in range(f.matrix.cols)]
    presentation = _Presentation(columns, f.target.relation_orders)
    return presentation.group, AbHom.from_columns(presentation.group, f.target, presentation.generators)


def preimage_element(f: AbHom, y: Sequence[int]) -> Optional[Vector]:
    """Some x with f(x) = y, or None when y is not in the image"""
    x = f._system.solve(f.target.reduce(y))
    if x is None:
        return None
    return f.source.reduce(x)


def is_injective(f: AbHom) -> bool:
    return kernel_of_hom(f)[0].is_trivial


def is_surjective(f: AbHom) -> bool:
    return cokernel_of_hom(f)[0].is_trivial


def is_isomorphism(f: AbHom) -> bool:
    return is_injective(f) and is_surjective(f)
