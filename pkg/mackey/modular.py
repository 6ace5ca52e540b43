"""
Diagonalisation over Z/e with numpy arrays

Cochain groups of a module with exponent e are Z/e-modules, so their linear
algebra can run modulo e without losing exactness. Entries stay below e. Up to
Config.MAX_EXPONENT every product and every row-sized sum fits in int64; above
it the same code runs on object arrays of Python integers.
"""

import logging
from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

import numpy as np
from sympy.core.intfunc import igcdex

from mackey.abelian_snf import FinAbGroup
from mackey.config import Config
from mackey.errors import ContractError, InputError

logger = logging.getLogger(__name__)


def working_dtype(e: int):
    """int64 up to Config.MAX_EXPONENT, Python integers above it"""
    if e < 1:
        raise InputError(f"Modulus must be positive, got {e}")
    return np.int64 if e <= Config.MAX_EXPONENT else object


def _unit_to_gcd(p: int, e: int) -> int:
    """A unit u mod e with u·p ≡ gcd(p, e)"""
    g = gcd(p, e)
    e1 = e // g
    u = pow((p // g) % e1, -1, e1) if e1 > 1 else 0
    while gcd(u, e) != 1:
        u += e1
    return u % e


def _bezout(a: int, b: int):
    s, t, d = igcdex(a, b)
    return int(s), int(t), int(d)


@dataclass
class ModularDiagonalForm:
    """
    D = P·A·Q over Z/e with D diagonal

    diag[i] = gcd(D_ii, e) for every i < min(rows, cols), so a zero diagonal entry
    is stored as e. Transforms that were not requested are None.
    """

    modulus: int
    diag: np.ndarray
    rank: int
    P: Optional[np.ndarray] = None
    P_inv: Optional[np.ndarray] = None
    Q: Optional[np.ndarray] = None
    Q_inv: Optional[np.ndarray] = None


class _Diagonalizer:
    def __init__(self, A: np.ndarray, e: int, track_left: bool, track_right: bool):
        self.e = e
        self.dtype = working_dtype(e)
        self.A = np.asarray(A, dtype=self.dtype) % e
        r, c = self.A.shape
        self.P = np.eye(r, dtype=self.dtype) if track_left else None
        self.P_inv = np.eye(r, dtype=self.dtype) if track_left else None
        self.Q = np.eye(c, dtype=self.dtype) if track_right else None
        self.Q_inv = np.eye(c, dtype=self.dtype) if track_right else None

    # row operations, mirrored on P and P_inv

    def swap_rows(self, i: int, k: int) -> None:
        if i == k:
            return
        self.A[[i, k]] = self.A[[k, i]]
        if self.P is not None:
            self.P[[i, k]] = self.P[[k, i]]
            self.P_inv[:, [i, k]] = self.P_inv[:, [k, i]]

    def scale_row(self, i: int, u: int) -> None:
        e = self.e
        self.A[i] = self.A[i] * u % e
        if self.P is not None:
            self.P[i] = self.P[i] * u % e
            self.P_inv[:, i] = self.P_inv[:, i] * pow(u, -1, e) % e

    def mix_rows(self, i: int, k: int, L, L_inv) -> None:
        e = self.e
        L = np.array(L, dtype=self.dtype) % e
        L_inv = np.array(L_inv, dtype=self.dtype) % e
        self.A[[i, k]] = L @ self.A[[i, k]] % e
        if self.P is not None:
            self.P[[i, k]] = L @ self.P[[i, k]] % e
            self.P_inv[:, [i, k]] = self.P_inv[:, [i, k]] @ L_inv % e

    def clear_rows(self, t: int, rows: np.ndarray, q: np.ndarray) -> None:
        # row_k -= q_k row_t
        e = self.e
        self.A[rows, t:] = (self.A[rows, t:] - np.outer(q, self.A[t, t:])) % e
        if self.P is not None:
            self.P[rows] = (self.P[rows] - np.outer(q, self.P[t])) % e
            self.P_inv[:, t] = (self.P_inv[:, t] + self.P_inv[:, rows] @ q) % e

    # column operations, mirrored on Q and Q_inv

    def swap_cols(self, j: int, k: int) -> None:
        if j == k:
            return
        self.A[:, [j, k]] = self.A[:, [k, j]]
        if self.Q is not None:
            self.Q[:, [j, k]] = self.Q[:, [k, j]]
            self.Q_inv[[j, k]] = self.Q_inv[[k, j]]

    def mix_cols(self, j: int, k: int, R, R_inv) -> None:
        e = self.e
        R = np.array(R, dtype=self.dtype) % e
        R_inv = np.array(R_inv, dtype=self.dtype) % e
        self.A[:, [j, k]] = self.A[:, [j, k]] @ R % e
        if self.Q is not None:
            self.Q[:, [j, k]] = self.Q[:, [j, k]] @ R % e
            self.Q_inv[[j, k]] = R_inv @ self.Q_inv[[j, k]] % e

    def clear_cols(self, t: int, cols: np.ndarray, q: np.ndarray) -> None:
        # col_j -= q_j col_t
        e = self.e
        self.A[t:, cols] = (self.A[t:, cols] - np.outer(self.A[t:, t], q)) % e
        if self.Q is not None:
            self.Q[:, cols] = (self.Q[:, cols] - np.outer(self.Q[:, t], q)) % e
            self.Q_inv[t] = (self.Q_inv[t] + q @ self.Q_inv[cols]) % e

    def _settle_pivot(self, t: int) -> None:
        """Clear row t and column t, shrinking the pivot by 2x2 gcd steps when needed"""
        A, e = self.A, self.e
        while True:
            self.scale_row(t, _unit_to_gcd(int(A[t, t]), e))
            g = int(A[t, t])

            below = t + 1 + np.flatnonzero(A[t + 1:, t])
            if below.size:
                bad = below[A[below, t] % g != 0]
                if bad.size:
                    k = int(bad[0])
                    b = int(A[k, t])
                    s, x, d = _bezout(g, b)
                    self.mix_rows(t, k, [[s, x], [-(b // d), g // d]], [[g // d, -x], [b // d, s]])
                    continue
                self.clear_rows(t, below, A[below, t] // g)

            right = t + 1 + np.flatnonzero(A[t, t + 1:])
            if right.size:
                bad = right[A[t, right] % g != 0]
                if bad.size:
                    j = int(bad[0])
                    b = int(A[t, j])
                    s, x, d = _bezout(g, b)
                    self.mix_cols(t, j, [[s, -(b // d)], [x, g // d]], [[g // d, b // d], [-x, s]])
                    continue
                self.clear_cols(t, right, A[t, right] // g)
            return

    def run(self) -> int:
        A, e = self.A, self.e
        r, c = A.shape
        rank = 0
        for t in range(min(r, c)):
            active = np.flatnonzero(A[t:, t:].any(axis=0))
            if not active.size:
                break
            j = t + int(active[0])
            rows = t + np.flatnonzero(A[t:, j])
            i = int(rows[np.argmin(np.gcd(A[rows, j], e))])
            self.swap_rows(t, i)
            self.swap_cols(t, j)
            self._settle_pivot(t)
            rank = t + 1
        return rank

    def canonicalize(self, diag: np.ndarray) -> None:
        """Replace pairs (a, b) by (gcd, lcm) until diag is a divisibility chain"""
        e = self.e
        n = len(diag)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = int(diag[i]), int(diag[j])
                if b % a == 0:
                    continue
                s, x, g = _bezout(a, b)
                if self.P is not None:
                    L = [[s, x], [-(b // g), a // g]]
                    L_inv = [[a // g, -x], [b // g, s]]
                    self.P[[i, j]] = np.array(L, dtype=self.dtype) % e @ self.P[[i, j]] % e
                    self.P_inv[:, [i, j]] = self.P_inv[:, [i, j]] @ (np.array(L_inv, dtype=self.dtype) % e) % e
                if self.Q is not None:
                    R = [[1, -(x * b // g)], [1, s * a // g]]
                    R_inv = [[s * a // g, x * b // g], [-1, 1]]
                    self.Q[:, [i, j]] = self.Q[:, [i, j]] @ (np.array(R, dtype=self.dtype) % e) % e
                    self.Q_inv[[i, j]] = (np.array(R_inv, dtype=self.dtype) % e) @ self.Q_inv[[i, j]] % e
                diag[i], diag[j] = g, a * b // g


def diagonalize(A: np.ndarray, e: int, track_left: bool = False, track_right: bool = False,
                canonical: bool = False) -> ModularDiagonalForm:
    """
    Diagonalise A over Z/e

    Args:
        A: integer matrix
        e: modulus; above Config.MAX_EXPONENT the work runs on Python integers
        track_left: keep P and P_inv
        track_right: keep Q and Q_inv
        canonical: make the diagonal a divisibility chain

    Returns:
        ModularDiagonalForm with D = P·A·Q mod e
    """
    work = _Diagonalizer(A, e, track_left, track_right)
    rank = work.run()
    size = min(work.A.shape)
    diag = np.array([gcd(int(work.A[i, i]), e) if i < rank else e for i in range(size)], dtype=work.dtype)
    if canonical:
        work.canonicalize(diag)
    return ModularDiagonalForm(e, diag, rank, work.P, work.P_inv, work.Q, work.Q_inv)


class CocycleQuotient:
    """
    ker d_out / im d_in for cochain groups Z^m / diag(rel) killed by e

    Cocycles are read in coordinates y = V_inv·x, where the kernel becomes
    t_i·Z/e in every slot; dividing by t turns the cocycles into
    ⊕ Z/g_i, and the coboundaries into the relation matrix whose canonical
    diagonalisation gives the cohomology group.
    """

    def __init__(self, d_in: Optional[np.ndarray], d_out: np.ndarray,
                 rel: Sequence[int], rel_next: Sequence[int], e: int):
        self.e = e
        self.dtype = working_dtype(e)
        rel = np.asarray(rel, dtype=self.dtype)
        rel_next = np.asarray(rel_next, dtype=self.dtype)
        m = len(rel)
        self.rel = rel

        F = (e // rel_next)[:, None] * (np.asarray(d_out, dtype=self.dtype) % e) % e
        kernel_form = diagonalize(F, e, track_right=True)
        g = np.full(m, e, dtype=self.dtype)
        g[:kernel_form.rank] = kernel_form.diag[:kernel_form.rank]
        self.V, self.V_inv = kernel_form.Q, kernel_form.Q_inv
        self.g = g
        self.t = e // g
        self.keep = np.flatnonzero(g > 1)

        blocks = [np.diag(rel)]
        if d_in is not None:
            blocks.insert(0, np.asarray(d_in, dtype=self.dtype) % e)
        W = self.V_inv @ (np.hstack(blocks) % e) % e
        g_keep = g[self.keep]
        t_keep = self.t[self.keep]
        Wk = W[self.keep]
        if np.any(Wk % t_keep[:, None]):
            raise ContractError("Coboundaries are not cocycles; the boundary maps do not compose to zero")
        Wk = (Wk // t_keep[:, None]) % g_keep[:, None]

        relation_form = diagonalize(np.hstack([Wk, np.diag(g_keep)]), e, track_left=True, canonical=True)
        h = np.full(len(self.keep), e, dtype=self.dtype)
        h[:len(relation_form.diag)] = relation_form.diag
        self.h = h
        self.keep2 = np.flatnonzero(h > 1)
        self.P = relation_form.P
        self.group = FinAbGroup(tuple(int(x) for x in h[self.keep2]))

        lifted = t_keep[:, None] * relation_form.P_inv[:, self.keep2] % e
        self.generators = self.V[:, self.keep] @ lifted % e % rel[:, None]
        logger.debug(f"Cocycle quotient of {m} coordinates: {self.group}")

    def coordinates(self, X: np.ndarray) -> np.ndarray:
        """Classes of the cocycles in the columns of X"""
        e = self.e
        Y = self.V_inv @ (np.asarray(X, dtype=self.dtype) % e) % e
        t_keep = self.t[self.keep][:, None]
        Yk = Y[self.keep]
        if np.any(Yk % t_keep) or np.any(Y[self.g == 1]):
            raise ContractError("Vector is not a cocycle")
        C = (Yk // t_keep) % self.g[self.keep][:, None]
        return self.P[self.keep2] @ C % e % self.h[self.keep2][:, None]
