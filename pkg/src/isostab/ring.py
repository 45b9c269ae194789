"""Arithmetic in Z/p^k (p odd) and exact linear algebra over it.

Ring elements are plain Python ints held as canonical representatives in
``[0, p**k)``.  Vectors are tuples of such ints; matrices are ``int64`` numpy
arrays reduced modulo ``p**k``.  Every routine here is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

DEFAULT_CAP = 10**8

# products of two residues summed over a row must stay inside int64
MAX_MODULUS = 1 << 24


class NotAUnit(ArithmeticError):
    pass


class EnumerationCapExceeded(RuntimeError):
    def __init__(self, requested: int, cap: int):
        super().__init__(f"enumeration of {requested} items exceeds cap {cap}")
        self.requested = requested
        self.cap = cap


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Ring:
    """The local ring Z/p^k with residue field F_p."""

    p: int
    k: int = 1

    def __post_init__(self) -> None:
        if self.p == 2:
            raise ValueError("2 must be invertible: p = 2 is not allowed")
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.k < 1:
            raise ValueError(f"exponent k = {self.k} must be >= 1")
        if self.p**self.k > MAX_MODULUS:
            raise ValueError(f"modulus {self.p}^{self.k} is beyond desk scale")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def is_field(self) -> bool:
        return self.k == 1

    def __str__(self) -> str:
        return f"F_{self.p}" if self.k == 1 else f"Z/{self.modulus}"

    def reduce(self, x: int) -> int:
        return int(x) % self.modulus

    def is_unit(self, x: int) -> bool:
        return int(x) % self.p != 0

    def inv(self, x: int) -> int:
        x = self.reduce(x)
        if x % self.p == 0:
            raise NotAUnit(f"{x} is not a unit in {self}")
        return pow(x, -1, self.modulus)

    def neg(self, x: int) -> int:
        return (-int(x)) % self.modulus

    def valuation(self, x: int) -> int:
        """p-adic valuation of x, with valuation(0) = k."""
        x = self.reduce(x)
        if x == 0:
            return self.k
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def units(self) -> list[int]:
        return [x for x in range(1, self.modulus) if x % self.p]

    def half(self) -> int:
        return self.inv(2)


def make_ring(p: int, k: int = 1) -> Ring:
    return Ring(p, k)


def invert(ring: Ring, x: int) -> int:
    return ring.inv(x)


def reduce(ring: Ring, M) -> np.ndarray:
    return np.asarray(M, dtype=np.int64) % ring.modulus


def matmul(ring: Ring, *mats) -> np.ndarray:
    out = reduce(ring, mats[0])
    for M in mats[1:]:
        out = (out @ reduce(ring, M)) % ring.modulus
    return out


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def residue_rank(ring: Ring, M) -> int:
    """Rank of M reduced mod p, by Gaussian elimination over F_p."""
    p = ring.p
    A = np.array(M, dtype=np.int64) % p
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        below = np.nonzero(A[r + 1:, c])[0] + r + 1
        if below.size:
            A[below] = (A[below] - np.outer(A[below, c], A[r])) % p
        r += 1
    return r


def _valuations(ring: Ring, A: np.ndarray) -> np.ndarray:
    v = np.full(A.shape, ring.k, dtype=np.int64)
    live = A != 0
    v[live] = 0
    tmp = A.copy()
    for _ in range(ring.k):
        step = live & (tmp % ring.p == 0)
        if not step.any():
            break
        v[step] += 1
        tmp[step] //= ring.p
        live = step
    return v


def local_smith(ring: Ring, M):
    """Diagonalize M over Z/p^k.

    Returns ``(S, vals, T)`` with ``S @ M @ T`` diagonal, its first
    ``len(vals)`` diagonal entries equal to ``p**vals[i]`` (vals < k) and the
    rest zero.  S and T are invertible.  Pivots are chosen by minimal
    valuation, so each pivot divides the remaining block.
    """
    m, p = ring.modulus, ring.p
    A = reduce(ring, M).copy()
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = A.shape
    S = identity(rows)
    T = identity(cols)
    vals: list[int] = []
    for t in range(min(rows, cols)):
        sub = A[t:, t:]
        if not sub.any():
            break
        val = _valuations(ring, sub)
        i, j = np.unravel_index(int(np.argmin(val)), val.shape)
        v = int(val[i, j])
        i += t
        j += t
        if i != t:
            A[[t, i]] = A[[i, t]]
            S[[t, i]] = S[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            T[:, [t, j]] = T[:, [j, t]]
        pv = p**v
        w = pow(int(A[t, t]) // pv, -1, m)
        A[t] = (A[t] * w) % m
        S[t] = (S[t] * w) % m
        for r in range(t + 1, rows):
            if A[r, t]:
                q = int(A[r, t]) // pv
                A[r] = (A[r] - q * A[t]) % m
                S[r] = (S[r] - q * S[t]) % m
        for c in range(t + 1, cols):
            if A[t, c]:
                q = int(A[t, c]) // pv
                A[:, c] = (A[:, c] - q * A[:, t]) % m
                T[:, c] = (T[:, c] - q * T[:, t]) % m
        vals.append(v)
    return S, vals, T


def solve_linear(ring: Ring, M, b) -> Optional[np.ndarray]:
    """Some x with M @ x = b exactly, or None if the system is insoluble."""
    M = reduce(ring, M)
    b = reduce(ring, b).reshape(-1)
    if M.shape[0] != b.shape[0]:
        raise ValueError("dimension mismatch")
    S, vals, T = local_smith(ring, M)
    c = (S @ b) % ring.modulus
    y = np.zeros(M.shape[1], dtype=np.int64)
    for i, v in enumerate(vals):
        pv = ring.p**v
        if int(c[i]) % pv:
            return None
        y[i] = int(c[i]) // pv
    if c[len(vals):].any():
        return None
    x = (T @ y) % ring.modulus
    assert not ((M @ x - b) % ring.modulus).any()
    return x


def left_inverse(ring: Ring, M) -> Optional[np.ndarray]:
    """X with X @ M = identity, or None when M has no left inverse.

    Over a local ring a left inverse exists iff M has full column rank over
    the residue field.
    """
    M = reduce(ring, M)
    rows, cols = M.shape
    if rows < cols:
        raise ValueError("left inverse needs rows >= cols")
    if residue_rank(ring, M) < cols:
        return None
    Mt = M.T
    X = np.zeros((cols, rows), dtype=np.int64)
    for j in range(cols):
        e = np.zeros(cols, dtype=np.int64)
        e[j] = 1
        x = solve_linear(ring, Mt, e)
        assert x is not None
        X[j] = x
    assert np.array_equal(matmul(ring, X, M), identity(cols))
    return X


def inverse(ring: Ring, M) -> np.ndarray:
    M = reduce(ring, M)
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix is not square")
    X = left_inverse(ring, M)
    if X is None:
        raise NotAUnit("matrix is not invertible")
    return X


def kernel_basis(ring: Ring, M) -> np.ndarray:
    """Columns spanning the kernel of M as a free summand.

    Only defined when the kernel is free, i.e. every pivot of M is a unit
    (for instance when M is surjective).
    """
    M = reduce(ring, M)
    S, vals, T = local_smith(ring, M)
    if any(vals):
        raise ValueError("kernel is not a free summand")
    return T[:, len(vals):].copy()


def enumerate_vectors(ring: Ring, dim: int, cap: int = DEFAULT_CAP) -> Iterator[tuple]:
    """All vectors of (Z/p^k)^dim in lexicographic order."""
    total = ring.modulus**dim
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    return itertools.product(range(ring.modulus), repeat=dim)


def all_vectors(ring: Ring, dim: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Array form of enumerate_vectors: shape (m**dim, dim), same order."""
    total = ring.modulus**dim
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((ring.modulus,) * dim, dtype=np.int64)
    return grid.reshape(dim, -1).T.copy()


def as_vector(ring: Ring, v: Sequence[int]) -> tuple:
    return tuple(int(x) % ring.modulus for x in v)
