"""The chain complex of isotropic unimodular sequences.

C_k is free abelian on IU_k(R^2n), the totally isotropic unimodular
sequences of length k; C_0 is generated by the empty sequence.  The
differential deletes one entry at a time with alternating signs.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .forms import HyperbolicSpace, InvalidSequence, columns, is_isotropic_unimodular
from .ring import EnumerationCapExceeded, Ring, all_vectors, kernel_basis, matmul, solve_linear
from .smith import smith_diagonal, solve_integer

log = logging.getLogger(__name__)

Seq = tuple


class NotACycle(ValueError):
    pass


class FreshVectorUnavailable(RuntimeError):
    pass


class GeneralPositionUnavailable(RuntimeError):
    pass


class LinearEngineUnavailable(RuntimeError):
    pass


class Chain:
    """A finite Z-linear combination of sequences of a fixed length."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Optional[dict] = None):
        self.degree = degree
        self.terms: dict = {}
        for seq, c in (terms or {}).items():
            self._add(seq, c)

    def _add(self, seq, c) -> None:
        seq = tuple(tuple(int(x) for x in v) for v in seq)
        if len(seq) != self.degree:
            raise ValueError(f"sequence of length {len(seq)} in a degree {self.degree} chain")
        val = self.terms.get(seq, 0) + int(c)
        if val:
            self.terms[seq] = val
        else:
            self.terms.pop(seq, None)

    @classmethod
    def generator(cls, seq, coef: int = 1) -> "Chain":
        return cls(len(seq), {tuple(seq): coef})

    def copy(self) -> "Chain":
        out = Chain(self.degree)
        out.terms = dict(self.terms)
        return out

    def _check(self, other: "Chain") -> None:
        if not isinstance(other, Chain) or other.degree != self.degree:
            raise ValueError("chains of different degrees")

    def __iadd__(self, other: "Chain") -> "Chain":
        self._check(other)
        for seq, c in other.terms.items():
            self._add(seq, c)
        return self

    def __isub__(self, other: "Chain") -> "Chain":
        self._check(other)
        for seq, c in other.terms.items():
            self._add(seq, -c)
        return self

    def __add__(self, other):
        out = self.copy()
        out += other
        return out

    def __sub__(self, other):
        out = self.copy()
        out -= other
        return out

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, m: int) -> "Chain":
        out = Chain(self.degree)
        if m:
            out.terms = {s: c * m for s, c in self.terms.items()}
        return out

    __mul__ = __rmul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Chain) and self.degree == other.degree and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def supports(self) -> list:
        return sorted(self.terms)

    def validate(self, space: HyperbolicSpace) -> None:
        m = space.ring.modulus
        for seq in self.terms:
            for v in seq:
                if len(v) != space.dim or any(not 0 <= x < m for x in v):
                    raise InvalidSequence(f"vector {v} is not a reduced element of R^{space.dim}")
            if not is_isotropic_unimodular(space, seq):
                raise InvalidSequence(f"{seq} is not totally isotropic and unimodular")

    def __repr__(self) -> str:
        return f"Chain({self.degree}, {len(self.terms)} terms)"


def apply_d(chain: Chain) -> Chain:
    """d(v_1, ..., v_k) = sum_i (-1)^(i+1) (v_1, ..., ^v_i, ..., v_k)."""
    k = chain.degree
    if k == 0:
        raise ValueError("the complex stops in degree 0")
    out = Chain(k - 1)
    for seq, c in chain.terms.items():
        for i in range(k):
            out._add(seq[:i] + seq[i + 1:], c if i % 2 == 0 else -c)
    return out


# -- enumeration -------------------------------------------------------------

def isotropic_vectors(space: HyperbolicSpace, cap: int = 10**7) -> np.ndarray:
    """IU_1 as an array, rows in lexicographic order."""
    ring = space.ring
    V = all_vectors(ring, space.dim, cap=cap)
    norms = 2 * (V[:, 0::2] * V[:, 1::2]).sum(axis=1) % ring.modulus
    ok = (norms == 0) & (V % ring.p).any(axis=1)
    return V[ok]


def _extend(space: HyperbolicSpace, cands: np.ndarray, k: int, cap: int,
            seeds: Optional[np.ndarray] = None) -> np.ndarray:
    ring = space.ring
    level = np.zeros((1, 0, space.dim), dtype=np.int64) if seeds is None else seeds
    for _ in range(k):
        pairs = kernels.extend_sequences(level, cands, ring.p, ring.modulus)
        if len(pairs) > cap:
            raise EnumerationCapExceeded(len(pairs), cap)
        level = np.concatenate([level[pairs[:, 0]], cands[pairs[:, 1]][:, None, :]], axis=1)
    return level


@lru_cache(maxsize=64)
def _iu_array(space: HyperbolicSpace, k: int, order_seed: Optional[int], cap: int) -> np.ndarray:
    cands = isotropic_vectors(space)
    if order_seed is not None:
        cands = cands[np.random.default_rng(order_seed).permutation(len(cands))]
    out = _extend(space, cands, k, cap)
    out.setflags(write=False)
    return out


def iu_array(space: HyperbolicSpace, k: int, *, cap: int = 10**7, order_seed: Optional[int] = None) -> np.ndarray:
    """IU_k as an (N, k, 2n) array.  ``order_seed`` permutes the vector
    order used during the search (the set is unchanged)."""
    if k < 0 or k > space.n:
        return np.zeros((0, k if k >= 0 else 0, space.dim), dtype=np.int64)
    return _iu_array(space, k, order_seed, cap)


def count_iu(space: HyperbolicSpace, k: int, *, cap: int = 10**7) -> int:
    if k > space.n:
        return 0
    if k == 0:
        return 1
    ring = space.ring
    prefix = iu_array(space, k - 1, cap=cap)
    return len(kernels.extend_sequences(prefix, isotropic_vectors(space), ring.p, ring.modulus))


def enumerate_iu(space: HyperbolicSpace, k: int, *, cap: int = 10**7,
                 order_seed: Optional[int] = None) -> list:
    """IU_k as a list of tuples of vector tuples, in lexicographic order
    unless ``order_seed`` is given."""
    arr = iu_array(space, k, cap=cap, order_seed=order_seed)
    return [tuple(tuple(int(x) for x in v) for v in s) for s in arr.tolist()]


# -- boundary matrices and homology -------------------------------------------

def boundary_matrix(space: HyperbolicSpace, k: int, *, cap: int = 10**7):
    """Dense matrix of d: C_k -> C_(k-1) in the lexicographic bases."""
    cols = enumerate_iu(space, k, cap=cap)
    rows = enumerate_iu(space, k - 1, cap=cap)
    return _matrix(rows, cols), rows, cols


def _matrix(rows: list, cols: list) -> np.ndarray:
    index = {s: i for i, s in enumerate(rows)}
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, seq in enumerate(cols):
        for i in range(len(seq)):
            M[index[seq[:i] + seq[i + 1:]], j] += 1 if i % 2 == 0 else -1
    return M


@dataclass
class HomologyGroup:
    degree: int
    free_rank: int
    torsion: list = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"degree": self.degree, "free_rank": self.free_rank, "torsion": self.torsion}


def homology(space: HyperbolicSpace, max_degree: int, *, cap: int = 10**5) -> list[HomologyGroup]:
    """H_0 .. H_max_degree of the complex by Smith normal form."""
    sizes = [count_iu(space, k, cap=cap) for k in range(max_degree + 2)]
    for k, s in enumerate(sizes):
        if s > cap:
            raise EnumerationCapExceeded(s, cap)
    diags = {}
    for k in range(1, max_degree + 2):
        if sizes[k] == 0:
            diags[k] = []
        else:
            diags[k] = smith_diagonal(boundary_matrix(space, k, cap=cap)[0])
    out = []
    for k in range(max_degree + 1):
        rank_out = len(diags[k]) if k >= 1 else 0
        rank_in = len(diags[k + 1])
        free = sizes[k] - rank_out - rank_in
        out.append(HomologyGroup(k, free, [d for d in diags[k + 1] if d > 1]))
    return out


# -- bounding cycles -----------------------------------------------------------

def _null_mod_p(p: int, S: np.ndarray) -> np.ndarray:
    """Columns spanning {y : tS y = 0} over F_p."""
    if S.shape[1] == 0:
        return np.eye(S.shape[0], dtype=np.int64)
    return kernel_basis(Ring(p), S.T % p)


def fresh_vector(space: HyperbolicSpace, L: np.ndarray, supports: Iterable) -> tuple:
    """First v in the span of the columns of L (coefficients in lexicographic
    order) such that s + (v,) is isotropic unimodular for every s in supports."""
    ring = space.ring
    mod, p = ring.modulus, ring.p
    supports = [tuple(s) for s in supports]
    L = np.asarray(L, dtype=np.int64).reshape(space.dim, -1)
    r = L.shape[1]
    inside = {}
    for s in supports:
        for v in s:
            if v not in inside:
                inside[v] = solve_linear(ring, L, np.array(v, dtype=np.int64)) is not None
    longest = max((sum(inside[v] for v in s) for s in supports), default=0)
    if r <= longest:
        raise ValueError(f"rank bound violated: rank(L) = {r} <= {longest} support vectors in L")
    tests = []
    for s in supports:
        S = columns(space, s)
        tests.append((matmul(ring, S.T, space.psi), _null_mod_p(p, S)))
    weights = mod ** np.arange(r - 1, -1, -1, dtype=np.int64)
    total = mod**r
    for lo in range(1, total, 4096):
        idx = np.arange(lo, min(lo + 4096, total), dtype=np.int64)
        coeffs = (idx[:, None] // weights[None, :]) % mod
        V = (coeffs @ L.T) % mod
        ok = (2 * (V[:, 0::2] * V[:, 1::2]).sum(axis=1) % mod == 0) & (V % p).any(axis=1)
        for P, N in tests:
            ok &= ~((V @ P.T) % mod).any(axis=1)
            ok &= ((V % p) @ N % p).any(axis=1)
        hits = np.nonzero(ok)[0]
        if hits.size:
            return tuple(int(x) for x in V[hits[0]])
    raise FreshVectorUnavailable(f"no fresh vector in a rank {r} module for {len(supports)} supports")


def _cone_down(z: Chain, space: HyperbolicSpace, W: np.ndarray) -> Chain:
    ring = space.ring
    k = z.degree
    in_W: dict = {}

    def member(v) -> bool:
        if v not in in_W:
            in_W[v] = solve_linear(ring, W, np.array(v, dtype=np.int64)) is not None
        return in_W[v]

    def split(seq) -> int:
        q = len(seq)
        while q and member(seq[q - 1]):
            q -= 1
        return q

    current = z.copy()
    tau = Chain(k + 1)
    for p in range(k, -1, -1):
        groups: dict = defaultdict(dict)
        for seq, c in current.terms.items():
            q = split(seq)
            if q > p:
                raise AssertionError("cone-down invariant broken")
            if q == p:
                groups[seq[:p]][seq[p:]] = c
        for u, tails in sorted(groups.items()):
            if p:
                U = columns(space, u)
                L = matmul(ring, W, kernel_basis(ring, matmul(ring, U.T, space.psi, W)))
            else:
                L = W
            v = fresh_vector(space, L, [u + w for w in tails])
            step = Chain(k + 1, {u + (v,) + w: c for w, c in tails.items()})
            if p % 2:
                step = -step
            tau += step
            current -= apply_d(step)
    if current:
        raise AssertionError("cone-down did not exhaust the cycle")
    return tau


def bound_cycle(z: Chain, space: HyperbolicSpace, *, seed: int = 0, trials: int = 10_000,
                attempts: int = 25) -> Chain:
    """tau with d tau = z, built from a Lagrangian in general position with
    the supports of z.  Needs deg z < n."""
    from .witt import SearchExhausted, find_general_position

    k = z.degree
    if k == 0:
        m = sum(z.terms.values())
        return Chain(1, {(space.e(1),): m}) if m else Chain(1)
    if k >= space.n:
        raise ValueError(f"cannot bound in degree {k} >= n = {space.n}")
    if apply_d(z):
        raise NotACycle("d z != 0")
    if not z:
        return Chain(k + 1)
    start = 0
    for _ in range(attempts):
        try:
            cert = find_general_position(space, z.supports(), seed, trials=trials, start=start)
        except SearchExhausted as exc:
            raise GeneralPositionUnavailable(str(exc)) from exc
        try:
            tau = _cone_down(z, space, cert.W)
        except FreshVectorUnavailable:
            start = cert.trial + 1
            continue
        if apply_d(tau) != z:
            raise AssertionError("d tau != z")
        return tau
    raise GeneralPositionUnavailable(f"no usable Lagrangian after {attempts} attempts")


def _solve_chain(z: Chain, rows: list, cols: list) -> Optional[Chain]:
    index = {s: i for i, s in enumerate(rows)}
    b = np.zeros(len(rows), dtype=np.int64)
    for seq, c in z.terms.items():
        if seq not in index:
            return None
        b[index[seq]] = c
    x = solve_integer(_matrix(rows, cols), b)
    if x is None:
        return None
    return Chain(z.degree + 1, {cols[j]: int(x[j]) for j in np.nonzero(x)[0]})


def bound_cycle_linear(z: Chain, space: HyperbolicSpace, *, cap: int = 5000, seed: int = 0,
                       batch: int = 4) -> Chain:
    """tau with d tau = z by integer linear algebra: on the whole complex when
    it is small, otherwise on a growing subcomplex spanned by few vectors."""
    k = z.degree
    if k >= space.n:
        raise ValueError(f"cannot bound in degree {k} >= n = {space.n}")
    if k and apply_d(z):
        raise NotACycle("d z != 0")
    if count_iu(space, k + 1, cap=10**7) <= cap:
        tau = _solve_chain(z, enumerate_iu(space, k), enumerate_iu(space, k + 1))
        if tau is None:
            raise LinearEngineUnavailable("z is not a boundary")
        return tau
    ring = space.ring
    pool = isotropic_vectors(space)
    rng = np.random.default_rng(seed)
    pool = pool[rng.permutation(len(pool))]
    chosen = {tuple(v) for seq in z.terms for v in seq}
    supports = z.supports()
    while True:
        verts = np.array(sorted(chosen), dtype=np.int64).reshape(-1, space.dim)
        top = _extend(space, verts, k + 1, cap)
        if len(top) > cap:
            raise LinearEngineUnavailable("subcomplex exceeded the column cap")
        cols = [tuple(tuple(int(x) for x in v) for v in s) for s in top.tolist()]
        rows = sorted({s[:i] + s[i + 1:] for s in cols for i in range(k + 1)} | set(z.terms))
        tau = _solve_chain(z, rows, cols)
        if tau is not None:
            return tau
        # add the vectors that extend the most supports
        fresh = np.array([tuple(v) not in chosen for v in pool])
        if not fresh.any():
            raise LinearEngineUnavailable("vertex pool exhausted")
        seqs = np.array(supports, dtype=np.int64).reshape(len(supports), k, space.dim)
        pairs = kernels.extend_sequences(seqs, pool, ring.p, ring.modulus)
        score = np.bincount(pairs[:, 1], minlength=len(pool)) if len(pairs) else np.zeros(len(pool), int)
        score = np.where(fresh, score, -1)
        for j in np.argsort(-score, kind="stable")[:batch]:
            if score[j] >= 0:
                chosen.add(tuple(int(x) for x in pool[j]))
        log.debug("linear engine grew to %d vertices", len(chosen))


def bound(z: Chain, space: HyperbolicSpace, *, seed: int = 0) -> tuple[Chain, str]:
    """Bound z, preferring the constructive engine.  Returns (tau, engine)."""
    try:
        return bound_cycle(z, space, seed=seed), "general_position"
    except (GeneralPositionUnavailable, FreshVectorUnavailable) as exc:
        log.info("falling back to the linear engine: %s", exc)
    return bound_cycle_linear(z, space, seed=seed), "linear"
