"""Kernel backend selection.

The compiled extension is used when it imports; ``ISOSTAB_PURE=1`` forces
the numpy fallback.  Both backends return identical results.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

if os.environ.get("ISOSTAB_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"


def backend(name=None):
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def count_isometries(template, modulus, n, *, limit=0, workers=1, impl=None):
    """Scan every filling of the free (-1) entries of ``template``.

    Returns ``(count, indices)`` where ``indices`` holds the first ``limit``
    matching candidate indices in increasing order.  The index range is split
    into contiguous blocks, one per worker; results are merged in block order
    so they do not depend on ``workers``.
    """
    impl = impl or _impl
    template = np.ascontiguousarray(template, dtype=np.int64).reshape(-1)
    nfree = int((template < 0).sum())
    total = modulus**nfree
    workers = max(1, min(workers, total))
    bounds = [total * w // workers for w in range(workers + 1)]

    def run(w):
        out = np.zeros(limit, dtype=np.int64)
        c = impl.count_isometries(template, modulus, n, bounds[w], bounds[w + 1], out)
        return c, out[:min(c, limit)]

    if workers == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(workers)))
    count = sum(c for c, _ in parts)
    found = np.concatenate([o for _, o in parts])[:limit] if limit else np.zeros(0, np.int64)
    return count, found


def decode_candidate(template, modulus, index):
    template = np.asarray(template, dtype=np.int64).reshape(-1).copy()
    free_pos = np.nonzero(template < 0)[0]
    for pos in free_pos[::-1]:
        template[pos] = index % modulus
        index //= modulus
    return template


def extend_sequences(seqs, cands, p, modulus, *, impl=None):
    """All (i, j) with cands[j] orthogonal to and independent mod p of seqs[i]."""
    impl = impl or _impl
    seqs = np.ascontiguousarray(seqs, dtype=np.int64)
    cands = np.ascontiguousarray(cands, dtype=np.int64)
    N = seqs.shape[0]
    V = max(cands.shape[0], 1)
    step = max(1, (1 << 20) // V)
    chunks = []
    for lo in range(0, N, step):
        block = np.ascontiguousarray(seqs[lo:lo + step])
        size = 1024
        while True:
            out = np.zeros((size, 2), dtype=np.int64)
            c = impl.extend_sequences(block, cands, p, modulus, out)
            if c <= size:
                break
            size = c
        out = out[:c]
        out[:, 0] += lo
        chunks.append(out)
    if not chunks:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(chunks)
