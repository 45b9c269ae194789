# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Semantics match isostab._pykernels exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline bint _preserves_psi(const i64* A, int dim, i64 m) noexcept nogil:
    cdef int a, b, j
    cdef i64 s, target
    for a in range(dim):
        for b in range(a, dim):
            s = 0
            for j in range(0, dim, 2):
                s += A[j * dim + a] * A[(j + 1) * dim + b] + A[(j + 1) * dim + a] * A[j * dim + b]
            s %= m
            target = 1 if (a % 2 == 0 and b == a + 1) else 0
            if s != target:
                return False
    return True


cdef inline i64 _inv_mod(i64 a, i64 p) noexcept nogil:
    cdef i64 t = 0, newt = 1, r = p, newr = a % p, q, tmp
    while newr:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def count_isometries(const i64[::1] template, i64 modulus, int n,
                     i64 start, i64 stop, i64[::1] out):
    """Count candidates in [start, stop) with tA psi A = psi.

    Free entries of ``template`` are marked -1; candidate ``idx`` fills them
    with its base-``modulus`` digits, last free entry least significant.
    The first ``len(out)`` matching indices are written to ``out``.
    Returns the total number of matches.
    """
    cdef int dim = 2 * n
    cdef int size = dim * dim
    cdef int nfree = 0, i, pos
    cdef i64 idx, rem, count = 0, nout = out.shape[0]
    cdef i64* A = <i64*> malloc(max(size, 1) * sizeof(i64))
    cdef int* free_pos = <int*> malloc(max(size, 1) * sizeof(int))
    if A == NULL or free_pos == NULL:
        raise MemoryError()
    try:
        for i in range(size):
            if template[i] < 0:
                free_pos[nfree] = i
                nfree += 1
                A[i] = 0
            else:
                A[i] = template[i]
        rem = start
        for i in range(nfree - 1, -1, -1):
            A[free_pos[i]] = rem % modulus
            rem //= modulus
        with nogil:
            idx = start
            while idx < stop:
                if _preserves_psi(A, dim, modulus):
                    if count < nout:
                        out[count] = idx
                    count += 1
                idx += 1
                i = nfree - 1
                while i >= 0:
                    pos = free_pos[i]
                    A[pos] += 1
                    if A[pos] < modulus:
                        break
                    A[pos] = 0
                    i -= 1
    finally:
        free(A)
        free(free_pos)
    return count


def extend_sequences(const i64[:, :, ::1] seqs, const i64[:, ::1] cands,
                     i64 p, i64 modulus, i64[:, ::1] out):
    """Pairs (i, j) where cands[j] is orthogonal to every vector of seqs[i]
    and independent of them modulo p.

    Pairs are written to ``out`` in (i, j) lexicographic order; returns the
    number found, which may exceed ``len(out)`` (excess pairs are dropped).
    """
    cdef Py_ssize_t N = seqs.shape[0], k = seqs.shape[1], dim = seqs.shape[2]
    cdef Py_ssize_t V = cands.shape[0]
    cdef Py_ssize_t i, j, r, c, t, rank, nout = out.shape[0]
    cdef i64 s, coef, inv, count = 0
    cdef i64* ech = <i64*> malloc(max(k * dim, 1) * sizeof(i64))
    cdef Py_ssize_t* piv = <Py_ssize_t*> malloc(max(k, 1) * sizeof(Py_ssize_t))
    cdef i64* w = <i64*> malloc(max(dim, 1) * sizeof(i64))
    cdef bint ok
    if ech == NULL or piv == NULL or w == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(N):
                # row echelon form of seqs[i] mod p, pivots normalized to 1
                rank = 0
                for r in range(k):
                    for c in range(dim):
                        w[c] = seqs[i, r, c] % p
                    for t in range(rank):
                        coef = w[piv[t]]
                        if coef:
                            for c in range(dim):
                                w[c] = (w[c] - coef * ech[t * dim + c]) % p
                                if w[c] < 0:
                                    w[c] += p
                    for c in range(dim):
                        if w[c]:
                            inv = _inv_mod(w[c], p)
                            for t in range(dim):
                                ech[rank * dim + t] = (w[t] * inv) % p
                            piv[rank] = c
                            rank += 1
                            break
                for j in range(V):
                    ok = True
                    for r in range(k):
                        s = 0
                        for c in range(0, dim, 2):
                            s += seqs[i, r, c] * cands[j, c + 1] + seqs[i, r, c + 1] * cands[j, c]
                        if s % modulus:
                            ok = False
                            break
                    if not ok:
                        continue
                    for c in range(dim):
                        w[c] = cands[j, c] % p
                    for t in range(rank):
                        coef = w[piv[t]]
                        if coef:
                            for c in range(dim):
                                w[c] = (w[c] - coef * ech[t * dim + c]) % p
                                if w[c] < 0:
                                    w[c] += p
                    ok = False
                    for c in range(dim):
                        if w[c]:
                            ok = True
                            break
                    if ok:
                        if count < nout:
                            out[count, 0] = i
                            out[count, 1] = j
                        count += 1
    finally:
        free(ech)
        free(piv)
        free(w)
    return count
