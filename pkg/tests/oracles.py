"""Slow, independent reference implementations used only by the tests."""

import itertools
from fractions import Fraction
from math import gcd


def inner(u, v, m):
    return sum(u[i] * v[i + 1] + u[i + 1] * v[i] for i in range(0, len(u), 2)) % m


def rank_mod_p(rows, p):
    """Rank over F_p by plain Gaussian elimination on lists."""
    rows = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def brute_iu(p, k, n, length):
    """IU_length(R^2n) for R = Z/p^k by testing every tuple of vectors."""
    m = p**k
    vecs = [v for v in itertools.product(range(m), repeat=2 * n)
            if inner(v, v, m) == 0 and any(x % p for x in v)]
    out = []
    for seq in itertools.product(vecs, repeat=length):
        if all(inner(a, b, m) == 0 for a, b in itertools.combinations(seq, 2)) \
                and rank_mod_p([list(v) for v in seq], p) == length:
            out.append(seq)
    return out


def det(M):
    """Exact determinant via fractions."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return int(d)


def determinantal_divisors(M):
    """gcd of all j x j minors, j = 1 .. rank."""
    rows, cols = len(M), len(M[0]) if M else 0
    out = []
    for j in range(1, min(rows, cols) + 1):
        g = 0
        for R in itertools.combinations(range(rows), j):
            for C in itertools.combinations(range(cols), j):
                g = gcd(g, det([[M[r][c] for c in C] for r in R]))
        if g == 0:
            break
        out.append(g)
    return out
