"""
Split-case norm functor over Z/n

For a split covering of degree d a module is a tuple of free modules, the
norm is their tensor product, and a tuple of matrices goes to the Kronecker
product of its components. Tensor bases are lexicographic with the last
index running fastest. Matrices are numpy object arrays of Python integers.
"""

import functools
import itertools
import logging
from dataclasses import dataclass
from math import factorial, gcd, prod
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mackey.config import Config
from mackey.errors import ContractError, InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidueRing:
    """Z/n, with n = 0 meaning the integers"""

    modulus: int

    def __post_init__(self):
        if self.modulus < 0 or self.modulus == 1:
            raise InputError(f"Modulus must be 0 or at least 2, got {self.modulus}")

    def reduce(self, x):
        return x % self.modulus if self.modulus else x

    def is_unit(self, x: int) -> bool:
        if self.modulus == 0:
            return x in (1, -1)
        return gcd(int(x), self.modulus) == 1

    def power(self, x: int, k: int) -> int:
        return pow(int(x), k, self.modulus) if self.modulus else int(x) ** k


@dataclass(frozen=True)
class SplitCovering:
    base: ResidueRing
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise InputError(f"Covering degree must be at least 1, got {self.degree}")


@dataclass(frozen=True)
class SplitModule:
    covering: SplitCovering
    ranks: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if len(self.ranks) != self.covering.degree:
            raise InputError(f"Need {self.covering.degree} ranks, got {len(self.ranks)}")
        if any(r < 0 for r in self.ranks):
            raise InputError("Ranks cannot be negative")


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """One matrix per component of the covering; component k is (target rank_k) x (source rank_k)"""

    covering: SplitCovering
    components: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.components) != self.covering.degree:
            raise InputError(f"Need {self.covering.degree} components, got {len(self.components)}")
        ring = self.covering.base
        comps = tuple(ring.reduce(np.array(c, dtype=object).reshape(np.shape(c))) for c in self.components)
        object.__setattr__(self, "components", comps)


def _matrix(rows, cols, values=None) -> np.ndarray:
    out = np.zeros((rows, cols), dtype=object)
    if values is not None:
        out[:, :] = values
    return out


def norm_module(sm: SplitModule) -> int:
    """Rank of the tensor product of the components"""
    return prod(sm.ranks)


def _check_shapes(t: MatrixTuple, source: SplitModule, target: SplitModule) -> None:
    for k, comp in enumerate(t.components):
        expected = (target.ranks[k], source.ranks[k])
        if comp.shape != expected:
            raise InputError(f"Component {k} has shape {comp.shape}, expected {expected}")


def norm_hom(t: MatrixTuple, source: SplitModule, target: SplitModule) -> np.ndarray:
    """φ_1 ⊗ ... ⊗ φ_d in the lexicographic tensor basis"""
    _check_shapes(t, source, target)
    product = functools.reduce(np.kron, t.components)
    return t.covering.base.reduce(np.asarray(product, dtype=object))


def identity_tuple(module: SplitModule) -> MatrixTuple:
    return MatrixTuple(module.covering, tuple(_matrix(r, r, np.eye(r, dtype=int)) for r in module.ranks))


def compose_tuples(t: MatrixTuple, u: MatrixTuple) -> MatrixTuple:
    """Componentwise t_k · u_k"""
    for k, (a, b) in enumerate(zip(t.components, u.components)):
        if a.shape[1] != b.shape[0]:
            raise InputError(f"Component {k}: cannot compose {a.shape} after {b.shape}")
    return MatrixTuple(t.covering, tuple(a.dot(b) for a, b in zip(t.components, u.components)))


def _endomorphism_module(t: MatrixTuple) -> SplitModule:
    ranks = []
    for k, comp in enumerate(t.components):
        if comp.shape[0] != comp.shape[1]:
            raise InputError(f"Component {k} is not square: {comp.shape}")
        ranks.append(comp.shape[0])
    return SplitModule(t.covering, tuple(ranks))


def random_endomorphism_tuple(rng: np.random.Generator, covering: SplitCovering, ranks: Sequence[int]) -> MatrixTuple:
    n = covering.base.modulus
    low, high = (0, n) if n else (-5, 6)
    comps = tuple(_matrix(r, r, rng.integers(low, high, size=(r, r)).tolist() if r else None) for r in ranks)
    return MatrixTuple(covering, comps)


def delta_monoid_check(t: MatrixTuple, u: MatrixTuple, product: Optional[MatrixTuple] = None) -> bool:
    """
    norm_hom(t ∘ u) = norm_hom(t)·norm_hom(u) and norm_hom(id) = id

    product replaces the componentwise composite when given, which lets a
    caller feed a deliberately wrong composite as a negative control.
    """
    module = _endomorphism_module(t)
    if _endomorphism_module(u).ranks != module.ranks:
        raise InputError("Endomorphism tuples act on different modules")
    ring = t.covering.base
    composite = product if product is not None else compose_tuples(t, u)
    lhs = norm_hom(composite, module, module)
    rhs = ring.reduce(norm_hom(t, module, module).dot(norm_hom(u, module, module)))
    size = norm_module(module)
    identity_ok = np.array_equal(norm_hom(identity_tuple(module), module, module), np.eye(size, dtype=int))
    return bool(np.array_equal(lhs, rhs) and identity_ok)


def norm_unit(covering: SplitCovering, units: Sequence[int]) -> int:
    """Product of the components; checked against the Kronecker product of the 1x1 tuple"""
    ring = covering.base
    units = [int(u) for u in units]
    if len(units) != covering.degree:
        raise InputError(f"Need {covering.degree} units, got {len(units)}")
    for k, u in enumerate(units):
        if not ring.is_unit(u):
            raise InputError(f"Component {k} ({u}) is not a unit modulo {ring.modulus}")
    value = ring.reduce(prod(units))
    one = SplitModule(covering, (1,) * covering.degree)
    via_kron = norm_hom(MatrixTuple(covering, tuple(_matrix(1, 1, u) for u in units)), one, one)[0, 0]
    if via_kron != value:
        raise ContractError(f"Unit norm {value} disagrees with the Kronecker product {via_kron}")
    return int(value)


def cohomological_degree_check(covering: SplitCovering, u: int) -> bool:
    """The norm of the diagonal tuple (u, ..., u) is u^d"""
    return norm_unit(covering, [u] * covering.degree) == covering.base.reduce(covering.base.power(u, covering.degree))


def shuffle_matrix(ranks: Sequence[int], sigma: Sequence[int]) -> np.ndarray:
    """P with P·(e_{j_0} ⊗ ... ⊗ e_{j_{d-1}}) = e_{j_σ(0)} ⊗ ... ⊗ e_{j_σ(d-1)}"""
    size = prod(ranks)
    idx = np.arange(size).reshape(tuple(ranks)).transpose(tuple(sigma)).reshape(-1)
    P = _matrix(size, size)
    P[np.arange(size), idx] = 1
    return P


def permute_tuple(sigma: Sequence[int], t: MatrixTuple) -> MatrixTuple:
    """σ·t with component k equal to t_σ(k)"""
    return MatrixTuple(t.covering, tuple(t.components[s] for s in sigma))


def shuffle_conjugation_witness(sigma: Sequence[int], t: MatrixTuple) -> Tuple[np.ndarray, bool]:
    """The shuffle P_σ and whether norm_hom(σ·t) = P_σ·norm_hom(t)·P_σ^-1"""
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(t.covering.degree)):
        raise InputError(f"{list(sigma)} is not a permutation of the components")
    module = _endomorphism_module(t)
    moved = permute_tuple(sigma, t)
    moved_module = _endomorphism_module(moved)
    P = shuffle_matrix(module.ranks, sigma)
    ring = t.covering.base
    conjugated = ring.reduce(P.dot(norm_hom(t, module, module)).dot(P.T))
    return P, bool(np.array_equal(norm_hom(moved, moved_module, moved_module), conjugated))


def _random_unit(rng: np.random.Generator, ring: ResidueRing) -> int:
    if ring.modulus == 0:
        return int(rng.choice([-1, 1]))
    while True:
        u = int(rng.integers(1, ring.modulus))
        if ring.is_unit(u):
            return u


def shuffle_sample(rng: np.random.Generator, degree: int, size: int = 24) -> List[Tuple[int, ...]]:
    """All permutations up to degree 4; above, the adjacent transpositions plus distinct random ones"""
    if degree <= 4:
        return list(itertools.permutations(range(degree)))
    # adjacent transpositions generate the symmetric group
    sample = []
    for i in range(degree - 1):
        sigma = list(range(degree))
        sigma[i], sigma[i + 1] = sigma[i + 1], sigma[i]
        sample.append(tuple(sigma))
    seen = set(sample)
    while len(sample) < min(size, factorial(degree)):
        sigma = tuple(int(x) for x in rng.permutation(degree))
        if sigma not in seen:
            seen.add(sigma)
            sample.append(sigma)
    return sample


def run_norm_checks(modulus: int, degree: int, ranks: Sequence[int], seed: int = 0,
                    trials: Optional[int] = None) -> dict:
    """
    Seeded rank, monoid, unit, degree and shuffle checks for one covering

    Args:
        modulus: n of the base ring Z/n (0 for the integers)
        degree: covering degree d
        ranks: one rank per component
        seed: seed of numpy's default_rng
        trials: random instances per check (Config.NORM_TRIALS when omitted)

    Returns:
        Structured results; "passed" is the conjunction of all checks
    """
    trials = trials if trials is not None else Config.NORM_TRIALS
    covering = SplitCovering(ResidueRing(modulus), degree)
    module = SplitModule(covering, tuple(ranks))
    rng = np.random.default_rng(seed)
    checks: Dict[str, dict] = {}

    def record(name: str, outcomes: List[Tuple[bool, object]]) -> None:
        failed = next((w for ok, w in outcomes if not ok), None)
        checks[name] = {"passed": failed is None, "instances": len(outcomes), "witness": failed}

    rank = norm_module(module)
    record("rank", [(rank == prod(module.ranks) and
                     norm_hom(identity_tuple(module), module, module).shape == (rank, rank), None)])

    monoid = []
    for i in range(trials):
        t = random_endomorphism_tuple(rng, covering, module.ranks)
        u = random_endomorphism_tuple(rng, covering, module.ranks)
        monoid.append((delta_monoid_check(t, u), {"trial": i}))
    record("monoid", monoid)

    units = []
    for i in range(trials):
        a = [_random_unit(rng, covering.base) for _ in range(degree)]
        b = [_random_unit(rng, covering.base) for _ in range(degree)]
        ab = [covering.base.reduce(x * y) for x, y in zip(a, b)]
        ok = norm_unit(covering, ab) == covering.base.reduce(norm_unit(covering, a) * norm_unit(covering, b))
        units.append((ok, {"trial": i, "a": a, "b": b}))
    record("unit_homomorphism", units)

    degrees = []
    for i in range(trials):
        u = _random_unit(rng, covering.base)
        degrees.append((cohomological_degree_check(covering, u), {"trial": i, "u": u}))
    record("degree", degrees)

    shuffles = []
    for sigma in shuffle_sample(rng, degree):
        t = random_endomorphism_tuple(rng, covering, module.ranks)
        _, ok = shuffle_conjugation_witness(sigma, t)
        shuffles.append((ok, {"sigma": list(sigma)}))
    record("shuffle", shuffles)

    passed = all(c["passed"] for c in checks.values())
    if not passed:
        logger.warning(f"Norm checks failed: {[name for name, c in checks.items() if not c['passed']]}")
    return {
        "modulus": modulus,
        "degree": degree,
        "ranks": list(module.ranks),
        "seed": seed,
        "trials": trials,
        "rank": rank,
        "checks": checks,
        "passed": passed,
    }
