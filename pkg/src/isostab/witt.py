"""Constructive transitivity and general position.

``hyperbolic_complete`` extends a totally isotropic unimodular sequence
(u_1, ..., u_p) to a hyperbolic basis (u_1, u_1#, ..., u_n, u_n#) of R^2n;
the matrix with those columns is an element of O_{n,n} moving e_i to u_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .forms import (
    D_matrix,
    HyperbolicSpace,
    InvalidSequence,
    check_orthogonal,
    columns,
    gram,
    is_isotropic_unimodular,
    pair_permutation,
    pair_swap,
    psi,
)
from .ring import kernel_basis, left_inverse, matmul, reduce, residue_rank, solve_linear
from .stabilizer import StabilizerParams, build_stabilizer_element


def _cols(space: HyperbolicSpace, seq) -> np.ndarray:
    if isinstance(seq, np.ndarray):
        return reduce(space.ring, seq).reshape(space.dim, -1)
    return columns(space, seq)


def _as_vectors(M: np.ndarray) -> tuple:
    return tuple(tuple(int(x) for x in col) for col in M.T)


@dataclass
class HyperbolicBasis:
    space: HyperbolicSpace
    matrix: np.ndarray  # columns u_1, u_1#, ..., u_n, u_n#

    def verify(self) -> bool:
        return (np.array_equal(gram(self.space, self.matrix), self.space.psi)
                and residue_rank(self.space.ring, self.matrix) == self.space.dim)

    @property
    def vectors(self) -> tuple:
        return _as_vectors(self.matrix)


def orth_complement(space: HyperbolicSpace, basis) -> np.ndarray:
    """Basis (as columns) of the psi-orthogonal complement of a nondegenerate span."""
    ring = space.ring
    B = _cols(space, basis)
    q = B.shape[1]
    if q and residue_rank(ring, gram(space, B)) < q:
        raise ValueError("input spans a degenerate subspace")
    if q == 0:
        return np.eye(space.dim, dtype=np.int64)
    C = kernel_basis(ring, matmul(ring, B.T, space.psi))
    if C.shape[1] != space.dim - q:
        raise ValueError("complement has the wrong rank")
    if C.shape[1] and residue_rank(ring, gram(space, C)) < C.shape[1]:
        raise ValueError("complement is degenerate")
    return C


def _coefficient_chunks(ring, r: int, chunk: int = 4096) -> Iterator[np.ndarray]:
    """Nonzero coefficient vectors of R^r in lexicographic order, in blocks."""
    m = ring.modulus
    total = m**r
    weights = m ** np.arange(r - 1, -1, -1, dtype=np.int64)
    for lo in range(1, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        yield (idx[:, None] // weights[None, :]) % m


def _first_isotropic(space: HyperbolicSpace, C: np.ndarray) -> np.ndarray:
    ring = space.ring
    P = space.psi
    for coeffs in _coefficient_chunks(ring, C.shape[1]):
        V = (coeffs @ C.T) % ring.modulus
        norms = np.einsum("bi,ij,bj->b", V, P, V) % ring.modulus
        ok = (norms == 0) & (V % ring.p).any(axis=1)
        hits = np.nonzero(ok)[0]
        if hits.size:
            return V[hits[0]]
    raise ValueError("no isotropic unimodular vector in the complement")


def _dual_vectors(space: HyperbolicSpace, U: np.ndarray, within: Optional[np.ndarray] = None) -> np.ndarray:
    """Columns y_i with <u_j, y_i> = delta_ij and (u_1, y_1, ...) of Gram psi_2p."""
    ring = space.ring
    mod = ring.modulus
    half = ring.half()
    p = U.shape[1]
    T = matmul(ring, U.T, space.psi)
    if within is not None:
        T = matmul(ring, T, within)
    Y = np.zeros((space.dim, p), dtype=np.int64)
    for i in range(p):
        e = np.zeros(p, dtype=np.int64)
        e[i] = 1
        y = solve_linear(ring, T, e)
        if y is None:
            raise InvalidSequence("sequence is not unimodular")
        Y[:, i] = y if within is None else matmul(ring, within, y)
    # make each dual isotropic
    for i in range(p):
        yy = int(matmul(ring, Y[:, i], space.psi, Y[:, i]))
        Y[:, i] = (Y[:, i] - half * yy * U[:, i]) % mod
    # clear cross pairings between duals
    G = gram(space, Y)
    Z = Y.copy()
    for j in range(p):
        for i in range(j):
            Z[:, j] = (Z[:, j] - int(G[j, i]) * U[:, i]) % mod
    return Z


def hyperbolic_complete(space: HyperbolicSpace, seq) -> HyperbolicBasis:
    ring = space.ring
    U = _cols(space, seq)
    p = U.shape[1]
    if p > space.n:
        raise ValueError(f"sequence of length {p} exceeds n = {space.n}")
    if not is_isotropic_unimodular(space, _as_vectors(U)):
        raise InvalidSequence("sequence is not totally isotropic and unimodular")
    Y = _dual_vectors(space, U)
    basis = np.zeros((space.dim, space.dim), dtype=np.int64)
    basis[:, 0:2 * p:2] = U
    basis[:, 1:2 * p:2] = Y
    if not np.array_equal(gram(space, basis[:, :2 * p]), psi(p)):
        raise AssertionError("completed pairs do not have Gram matrix psi")
    for t in range(p, space.n):
        C = orth_complement(space, basis[:, :2 * t])
        w = _first_isotropic(space, C)
        basis[:, 2 * t] = w
        basis[:, 2 * t + 1] = _dual_vectors(space, w.reshape(-1, 1), within=C)[:, 0]
    result = HyperbolicBasis(space, basis % ring.modulus)
    if not result.verify():
        raise AssertionError("completion failed to produce a hyperbolic basis")
    return result


def transitivity_witness(space: HyperbolicSpace, seq) -> np.ndarray:
    """g in O_{n,n} with g e_i = seq[i]."""
    g = hyperbolic_complete(space, seq).matrix
    U = _cols(space, seq)
    assert check_orthogonal(space.ring, g)
    assert np.array_equal(g[:, 0:2 * U.shape[1]:2], U)
    return g


# -- general position --------------------------------------------------------

def pairing(space: HyperbolicSpace, T, S) -> np.ndarray:
    """The k' x k matrix (<w_i, v_j>)."""
    return matmul(space.ring, _cols(space, T).T, space.psi, _cols(space, S))


def general_position_witness(space: HyperbolicSpace, T, S) -> Optional[np.ndarray]:
    """A left inverse of the pairing matrix of T against S, or None."""
    P = pairing(space, T, S)
    if P.shape[1] > P.shape[0]:
        raise ValueError("size order violated: |S| > |T|")
    return left_inverse(space.ring, P)


def is_general_position(space: HyperbolicSpace, T, S) -> bool:
    return general_position_witness(space, T, S) is not None


class SearchExhausted(RuntimeError):
    def __init__(self, trials: int):
        super().__init__(f"no subspace in general position after {trials} candidates")
        self.trials = trials


@dataclass
class GeneralPositionCertificate:
    space: HyperbolicSpace
    W: np.ndarray
    targets: list
    witnesses: list
    complements: list
    trial: int = 0

    def verify(self) -> bool:
        ring = self.space.ring
        n = self.space.n
        if self.W.shape != (self.space.dim, n):
            return False
        if not is_isotropic_unimodular(self.space, _as_vectors(self.W)):
            return False
        for V, X, K in zip(self.targets, self.witnesses, self.complements):
            k = V.shape[1]
            P = pairing(self.space, self.W, V)
            if not np.array_equal(matmul(ring, X, P), np.eye(k, dtype=np.int64)):
                return False
            if K.shape[1] != n - k or residue_rank(ring, K) != n - k:
                return False
            if pairing(self.space, K, V).any():
                return False
            if residue_rank(ring, np.hstack([self.W, K])) != n:
                return False
            for col in K.T:
                if solve_linear(ring, self.W, col) is None:
                    return False
        return len(self.targets) == len(self.witnesses) == len(self.complements)

    def to_dict(self) -> dict:
        return {
            "ring": [self.space.ring.p, self.space.ring.k],
            "n": self.space.n,
            "trial": self.trial,
            "W": _as_vectors(self.W),
            "targets": [_as_vectors(V) for V in self.targets],
            "witnesses": [X.tolist() for X in self.witnesses],
            "complements": [_as_vectors(K) for K in self.complements],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeneralPositionCertificate":
        from .ring import Ring

        space = HyperbolicSpace(Ring(*data["ring"]), data["n"])
        vecs = lambda vs: columns(space, vs) if vs else np.zeros((space.dim, 0), dtype=np.int64)
        return cls(
            space,
            vecs(data["W"]),
            [vecs(V) for V in data["targets"]],
            [np.array(X, dtype=np.int64).reshape(len(V), space.n) for X, V in zip(data["witnesses"], data["targets"])],
            [vecs(K) for K in data["complements"]],
            data.get("trial", 0),
        )


def _random_generator(space: HyperbolicSpace, rng: np.random.Generator) -> np.ndarray:
    ring = space.ring
    n = space.n
    kind = rng.integers(0, 4)
    if kind == 0:
        return pair_permutation(space, rng.permutation(n))
    if kind == 1:
        return pair_swap(space, int(rng.integers(1, n + 1)))
    if kind == 2:
        a = int(rng.choice(ring.units()))
        return D_matrix(space, a, int(rng.integers(1, n + 1)))
    # Eichler-type unipotent: an element of St(e_1) with B = 1, moved to a random pair
    x = rng.integers(0, ring.modulus, 2 * (n - 1))
    E = build_stabilizer_element(StabilizerParams.from_free(space, 1, (), x))
    P = pair_permutation(space, rng.permutation(n))
    return matmul(ring, P, E, P.T)


def _exhaustive_allowed(space: HyperbolicSpace) -> bool:
    return space.ring.is_field and space.ring.p <= 5 and space.n <= 2


def lagrangians(space: HyperbolicSpace) -> list[np.ndarray]:
    """Every rank-n totally isotropic summand over a field, one basis each."""
    from .complex import enumerate_iu

    if not space.ring.is_field:
        raise ValueError("Lagrangian enumeration is implemented over fields only")
    seen = {}
    for seq in enumerate_iu(space, space.n):
        W = columns(space, seq)
        key = _rref_key(space.ring.p, W)
        if key not in seen:
            seen[key] = W
    return list(seen.values())


def _rref_key(p: int, W: np.ndarray) -> bytes:
    A = W.T % p
    r = 0
    for c in range(A.shape[1]):
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        for i in range(A.shape[0]):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
        if r == A.shape[0]:
            break
    return A.tobytes()


def lagrangian_candidates(space: HyperbolicSpace, seed: int, trials: int = 10_000) -> Iterator[tuple]:
    """Candidate Lagrangians (trial index, basis columns), deterministic in ``seed``.

    Trial 0 is span(e_i), trial 1 is span(f_i); later trials are images of
    span(e_i) under products of random generators.  Small field cases then
    continue with every Lagrangian.
    """
    n = space.n
    E = np.zeros((space.dim, n), dtype=np.int64)
    F = np.zeros((space.dim, n), dtype=np.int64)
    for i in range(n):
        E[2 * i, i] = 1
        F[2 * i + 1, i] = 1
    rng = np.random.default_rng(seed)
    for t in range(trials):
        if t == 0:
            yield t, E
        elif t == 1:
            yield t, F
        else:
            W = E
            for _ in range(2 * n + 2):
                W = matmul(space.ring, _random_generator(space, rng), W)
            yield t, W
    if _exhaustive_allowed(space):
        for i, W in enumerate(lagrangians(space)):
            yield trials + i, W


def find_general_position(space: HyperbolicSpace, targets: Sequence, seed: int,
                          trials: int = 10_000, start: int = 0) -> GeneralPositionCertificate:
    """First candidate Lagrangian (index >= start) in general position with every target."""
    if space.n < 2:
        raise ValueError("general position search needs n >= 2")
    ring = space.ring
    Vs = [_cols(space, T) for T in targets]
    for V in Vs:
        if V.shape[1] > space.n - 1:
            raise ValueError("targets must have at most n - 1 elements")
    sizes = [V.shape[1] for V in Vs]
    stacked = np.hstack(Vs) if Vs else np.zeros((space.dim, 0), dtype=np.int64)
    bounds = np.cumsum([0] + sizes)
    last = start - 1
    for t, W in lagrangian_candidates(space, seed, trials):
        last = t
        if t < start:
            continue
        P = matmul(ring, W.T, space.psi, stacked)
        if all(residue_rank(ring, P[:, bounds[i]:bounds[i + 1]]) == sizes[i] for i in range(len(Vs))):
            witnesses, complements = [], []
            for V in Vs:
                witnesses.append(general_position_witness(space, W, V))
                K = kernel_basis(ring, matmul(ring, V.T, space.psi, W))
                complements.append(matmul(ring, W, K))
            cert = GeneralPositionCertificate(space, W, Vs, witnesses, complements, t)
            assert cert.verify()
            return cert
    raise SearchExhausted(last + 1)
