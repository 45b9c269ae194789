"""Brute-force membership scans over all candidate matrices.

These are the independent oracles for group and stabilizer orders: every
filling of the free entries is tested against tA psi A = psi.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .ring import DEFAULT_CAP, EnumerationCapExceeded, Ring


def fixing_template(n: int, k: int) -> np.ndarray:
    """Template with columns e_1..e_k pinned to themselves, all else free."""
    dim = 2 * n
    T = np.full((dim, dim), -1, dtype=np.int64)
    for i in range(k):
        T[:, 2 * i] = 0
        T[2 * i, 2 * i] = 1
    return T


def _check_cap(ring: Ring, template: np.ndarray, cap: int) -> None:
    total = ring.modulus ** int((template < 0).sum())
    if total > cap:
        raise EnumerationCapExceeded(total, cap)


def count_fixing(ring: Ring, n: int, k: int = 0, *, workers: int = 1, cap: int = DEFAULT_CAP) -> int:
    """|{A in O_{n,n} : A e_i = e_i, i <= k}| by exhaustive scan (k = 0 gives |O_{n,n}|)."""
    T = fixing_template(n, k)
    _check_cap(ring, T, cap)
    count, _ = kernels.count_isometries(T, ring.modulus, n, workers=workers)
    return count


def group_order(ring: Ring, n: int, *, workers: int = 1, cap: int = DEFAULT_CAP) -> int:
    if n == 0:
        return 1
    return count_fixing(ring, n, 0, workers=workers, cap=cap)


def elements_fixing(ring: Ring, n: int, k: int = 0, *, workers: int = 1,
                    cap: int = DEFAULT_CAP, limit: int = 10**6) -> list[np.ndarray]:
    """All elements of O_{n,n} fixing e_1..e_k, in scan order."""
    dim = 2 * n
    if n == 0:
        return [np.zeros((0, 0), dtype=np.int64)]
    T = fixing_template(n, k)
    _check_cap(ring, T, cap)
    count, idx = kernels.count_isometries(T, ring.modulus, n, limit=limit, workers=workers)
    if count > limit:
        raise EnumerationCapExceeded(count, limit)
    return [kernels.decode_candidate(T, ring.modulus, int(i)).reshape(dim, dim) for i in idx]
