"""Numpy implementations of the compiled kernels, used when the extension is absent."""

import numpy as np

_CHUNK = 1 << 17


def _psi_perm(dim):
    perm = np.arange(dim)
    perm[0::2] += 1
    perm[1::2] -= 1
    return perm


def count_isometries(template, modulus, n, start, stop, out):
    template = np.asarray(template, dtype=np.int64)
    dim = 2 * n
    free_pos = np.nonzero(template < 0)[0]
    nfree = free_pos.size
    target = np.zeros((dim, dim), dtype=np.int64)
    for i in range(0, dim, 2):
        target[i, i + 1] = target[i + 1, i] = 1
    perm = _psi_perm(dim)
    weights = modulus ** np.arange(nfree - 1, -1, -1, dtype=np.int64)
    count = 0
    nout = len(out)
    for lo in range(start, stop, _CHUNK):
        hi = min(lo + _CHUNK, stop)
        idx = np.arange(lo, hi, dtype=np.int64)
        A = np.broadcast_to(template, (hi - lo, dim * dim)).copy()
        if nfree:
            A[:, free_pos] = (idx[:, None] // weights[None, :]) % modulus
        A = A.reshape(-1, dim, dim)
        # tA psi A: psi permutes rows within each hyperbolic pair
        G = np.einsum("bji,bjk->bik", A, A[:, perm, :]) % modulus
        hits = idx[(G == target).all(axis=(1, 2))]
        take = min(max(nout - count, 0), hits.size)
        out[count:count + take] = hits[:take]
        count += hits.size
    return count


def extend_sequences(seqs, cands, p, modulus, out):
    seqs = np.asarray(seqs, dtype=np.int64)
    cands = np.asarray(cands, dtype=np.int64)
    N, k, dim = seqs.shape
    perm = _psi_perm(dim)
    # pairing[i, r, j] = <seqs[i, r], cands[j]>
    pairing = np.einsum("irc,jc->irj", seqs, cands[:, perm]) % modulus
    orth = ~pairing.any(axis=1) if k else np.ones((N, cands.shape[0]), dtype=bool)
    count = 0
    nout = len(out)
    cands_p = cands % p
    for i in range(N):
        js = np.nonzero(orth[i])[0]
        if js.size == 0:
            continue
        ech, piv = _echelon_mod_p(seqs[i] % p, p)
        W = cands_p[js].copy()
        for row, c in zip(ech, piv):
            W = (W - np.outer(W[:, c], row)) % p
        keep = js[W.any(axis=1)]
        for j in keep:
            if count < nout:
                out[count, 0] = i
                out[count, 1] = j
            count += 1
    return count


def _echelon_mod_p(rows, p):
    ech, piv = [], []
    for w in rows:
        w = w.copy()
        for row, c in zip(ech, piv):
            w = (w - w[c] * row) % p
        nz = np.nonzero(w)[0]
        if nz.size:
            c = int(nz[0])
            ech.append((w * pow(int(w[c]), -1, p)) % p)
            piv.append(c)
    return ech, piv
