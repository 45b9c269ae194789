"""The hyperbolic form psi_2n and the matrices built from it.

The standard basis is always ordered e_1, f_1, ..., e_n, f_n, so that
<e_i, f_j> = delta_ij and psi_2n is block diagonal in 2x2 swaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .ring import Ring, identity, inverse, matmul, reduce, residue_rank

Vector = tuple


def psi(n: int) -> np.ndarray:
    P = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for i in range(n):
        P[2 * i, 2 * i + 1] = 1
        P[2 * i + 1, 2 * i] = 1
    return P


@dataclass(frozen=True)
class HyperbolicSpace:
    ring: Ring
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("hyperbolic rank must be >= 0")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @cached_property
    def psi(self) -> np.ndarray:
        return psi(self.n)

    def e(self, i: int) -> Vector:
        """The basis vector e_i (1-based)."""
        v = [0] * self.dim
        v[2 * (i - 1)] = 1
        return tuple(v)

    def f(self, i: int) -> Vector:
        v = [0] * self.dim
        v[2 * (i - 1) + 1] = 1
        return tuple(v)

    def standard_sequence(self, p: int) -> tuple:
        return tuple(self.e(i) for i in range(1, p + 1))

    def zero(self) -> Vector:
        return (0,) * self.dim

    def __str__(self) -> str:
        return f"H^{self.n}({self.ring})"


def inner(space: HyperbolicSpace, u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != space.dim or len(v) != space.dim:
        raise ValueError(f"vectors must have dimension {space.dim}")
    total = 0
    for i in range(0, space.dim, 2):
        total += u[i] * v[i + 1] + u[i + 1] * v[i]
    return total % space.ring.modulus


def columns(space: HyperbolicSpace, seq: Iterable[Sequence[int]]) -> np.ndarray:
    """Matrix whose columns are the vectors of seq (shape dim x len(seq))."""
    seq = list(seq)
    if not seq:
        return np.zeros((space.dim, 0), dtype=np.int64)
    return reduce(space.ring, np.array(seq, dtype=np.int64).T)


def gram(space: HyperbolicSpace, cols: np.ndarray) -> np.ndarray:
    cols = reduce(space.ring, cols)
    return matmul(space.ring, cols.T, space.psi, cols)


def is_totally_isotropic(space: HyperbolicSpace, seq) -> bool:
    return not gram(space, columns(space, seq)).any()


def is_unimodular(space: HyperbolicSpace, seq) -> bool:
    # rank q over the residue field; equivalent to the subsequence-wise
    # definition because independence mod p is inherited by subsequences
    seq = list(seq)
    return residue_rank(space.ring, columns(space, seq)) == len(seq)


def is_isotropic_unimodular(space: HyperbolicSpace, seq) -> bool:
    seq = list(seq)
    if any(len(v) != space.dim for v in seq):
        raise ValueError(f"vectors must have dimension {space.dim}")
    return is_totally_isotropic(space, seq) and is_unimodular(space, seq)


class InvalidSequence(ValueError):
    pass


@dataclass(frozen=True)
class IsotropicSequence:
    """A validated totally isotropic unimodular sequence."""

    space: HyperbolicSpace
    vectors: tuple

    def __post_init__(self) -> None:
        vecs = tuple(tuple(int(x) % self.space.ring.modulus for x in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if not is_isotropic_unimodular(self.space, vecs):
            raise InvalidSequence(f"not totally isotropic and unimodular: {vecs}")

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    @property
    def matrix(self) -> np.ndarray:
        return columns(self.space, self.vectors)


def apply(ring: Ring, A: np.ndarray, seq) -> tuple:
    """Image of a sequence of vectors under the matrix A."""
    seq = list(seq)
    if not seq:
        return ()
    cols = matmul(ring, A, np.array(seq, dtype=np.int64).T)
    return tuple(tuple(int(x) for x in col) for col in cols.T)


def _rank_from_shape(A: np.ndarray) -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got {A.shape}")
    return A.shape[0] // 2


def check_orthogonal(ring: Ring, A) -> bool:
    A = reduce(ring, A)
    n = _rank_from_shape(A)
    P = psi(n)
    return np.array_equal(matmul(ring, A.T, P, A), P)


def check_similitude(ring: Ring, A) -> Optional[int]:
    """The associated unit a of A if tA psi A = a psi, else None."""
    A = reduce(ring, A)
    n = _rank_from_shape(A)
    P = psi(n)
    G = matmul(ring, A.T, P, A)
    if n == 0:
        return 1
    a = int(G[0, 1])
    if not ring.is_unit(a):
        return None
    if np.array_equal(G, (a * P) % ring.modulus):
        return a
    return None


def D_matrix(space: HyperbolicSpace, a: int, k: int) -> np.ndarray:
    """D_{a,k}: diag(a, a^-1) on the first k hyperbolic pairs, identity after."""
    if not 0 <= k <= space.n:
        raise ValueError(f"k = {k} out of range for n = {space.n}")
    ai = space.ring.inv(a)
    M = identity(space.dim)
    for i in range(k):
        M[2 * i, 2 * i] = space.ring.reduce(a)
        M[2 * i + 1, 2 * i + 1] = ai
    return M


def B_matrix(space: HyperbolicSpace, a: int) -> np.ndarray:
    """B_a = diag(1, a, 1, a, ...), a similitude with associated unit a."""
    space.ring.inv(a)
    M = identity(space.dim)
    for i in range(space.n):
        M[2 * i + 1, 2 * i + 1] = space.ring.reduce(a)
    return M


def scalar_matrix(space: HyperbolicSpace, a: int) -> np.ndarray:
    space.ring.inv(a)
    return identity(space.dim) * space.ring.reduce(a)


def block_embed(ring: Ring, A, m: int = 1) -> np.ndarray:
    """Image of A under O_{r,r} -> O_{r+1,r+1}, A -> diag(1, 1, A), iterated m times."""
    A = reduce(ring, A)
    size = A.shape[0] + 2 * m
    M = identity(size)
    M[2 * m:, 2 * m:] = A
    return M


def pair_permutation(space: HyperbolicSpace, perm: Sequence[int]) -> np.ndarray:
    """Matrix sending e_i -> e_perm[i], f_i -> f_perm[i] (0-based perm)."""
    M = np.zeros((space.dim, space.dim), dtype=np.int64)
    for i, j in enumerate(perm):
        M[2 * j, 2 * i] = 1
        M[2 * j + 1, 2 * i + 1] = 1
    return M


def pair_swap(space: HyperbolicSpace, i: int) -> np.ndarray:
    """Exchange e_i and f_i (1-based)."""
    M = identity(space.dim)
    a, b = 2 * (i - 1), 2 * (i - 1) + 1
    M[[a, b]] = M[[b, a]]
    return M


def orthogonal_inverse(ring: Ring, A) -> np.ndarray:
    """A^-1 = psi tA psi for A in O_{n,n}; falls back to a general inverse."""
    A = reduce(ring, A)
    n = _rank_from_shape(A)
    P = psi(n)
    X = matmul(ring, P, A.T, P)
    if np.array_equal(matmul(ring, X, A), identity(2 * n)):
        return X
    return inverse(ring, A)
