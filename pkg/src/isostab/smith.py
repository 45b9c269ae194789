"""Exact integer linear algebra: Smith normal form and solving A x = b over Z.

Entries are Python ints in object arrays, so there is no overflow.
"""

from __future__ import annotations

from math import gcd
from typing import Optional

import numpy as np


_SAFE = 1 << 30  # int64 elimination stays exact while entries are below this


def _as_object(A) -> np.ndarray:
    return np.asarray(A).astype(object)


def _start(A) -> np.ndarray:
    A = np.asarray(A)
    if A.dtype != object and A.size and np.abs(A).max() < _SAFE:
        return A.astype(np.int64, copy=True)
    return _as_object(A)


def _smallest(sub: np.ndarray):
    mask = sub != 0
    if not mask.any():
        return None
    mag = np.abs(sub)
    if sub.dtype == object:
        mag = np.where(mask, mag, max(mag.max(), 0) + 1)
    else:
        mag = np.where(mask, mag, np.iinfo(np.int64).max)
    i, j = np.unravel_index(int(np.argmin(mag)), sub.shape)
    return int(i), int(j)


def diagonalize(A, b=None):
    """Reduce A to diagonal form by unimodular row and column operations.

    Returns (diag, b', log) where diag lists the nonzero pivots, b' is b
    under the same row operations and log records the column operations
    as ("swap", i, j) or ("add", c, t, q) meaning col_c -= q * col_t.
    """
    A = _start(A)
    rows, cols = A.shape
    bb = None if b is None else np.array([int(v) for v in b], dtype=object)
    log = []
    t = 0
    while t < min(rows, cols):
        pos = _smallest(A[t:, t:])
        if pos is None:
            break
        i, j = pos[0] + t, pos[1] + t
        while True:
            if i != t:
                A[[t, i]] = A[[i, t]]
                if bb is not None:
                    bb[[t, i]] = bb[[i, t]]
            if j != t:
                A[:, [t, j]] = A[:, [j, t]]
                log.append(("swap", t, j))
            piv = int(A[t, t])
            rs = np.nonzero(A[t + 1:, t])[0] + t + 1
            if rs.size:
                q = A[rs, t] // piv
                A[np.ix_(rs, np.arange(t, cols))] -= np.outer(q, A[t, t:])
                if bb is not None:
                    bb[rs] -= q.astype(object) * bb[t]
            cs = np.nonzero(A[t, t + 1:])[0] + t + 1
            if cs.size:
                q = A[t, cs] // piv
                A[np.ix_(np.arange(t, rows), cs)] -= np.outer(A[t:, t], q)
                log.extend(("add", int(c), t, int(qc)) for c, qc in zip(cs, q))
            if A.dtype != object and np.abs(A[t:, t:]).max(initial=0) >= _SAFE:
                A = _as_object(A)
            col_left = np.nonzero(A[t + 1:, t])[0]
            row_left = np.nonzero(A[t, t + 1:])[0]
            if col_left.size == 0 and row_left.size == 0:
                break
            # remainders are smaller than the pivot: bring the smallest one in
            cands = [(abs(A[r + t + 1, t]), r + t + 1, t) for r in col_left]
            cands += [(abs(A[t, c + t + 1]), t, c + t + 1) for c in row_left]
            _, i, j = min(cands)
        t += 1
    return [int(A[s, s]) for s in range(t)], bb, log


def smith_diagonal(A) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    A = np.asarray(A)
    if A.size == 0:
        return []
    diag, _, _ = diagonalize(A)
    d = [abs(int(v)) for v in diag]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return d


def integer_rank(A) -> int:
    return len(smith_diagonal(A))


def solve_integer(A, b) -> Optional[np.ndarray]:
    """An integer solution of A x = b, or None if there is none."""
    A = np.asarray(A)
    rows, cols = A.shape
    diag, bb, log = diagonalize(A, b)
    r = len(diag)
    if any(bb[r:]):
        return None
    y = np.zeros(cols, dtype=object)
    for s, d in enumerate(diag):
        if bb[s] % d:
            return None
        y[s] = bb[s] // d
    for op in reversed(log):
        if op[0] == "swap":
            _, i, j = op
            y[[i, j]] = y[[j, i]]
        else:
            _, c, t, q = op
            y[t] -= q * y[c]
    check = _as_object(A).dot(y) if cols else np.zeros(rows, dtype=object)
    if any(check[i] != int(b[i]) for i in range(rows)):
        raise AssertionError("integer solve produced a wrong solution")
    return y
