"""Seeded random sampling of sequences, group elements and chains."""

from __future__ import annotations

import numpy as np

from .forms import HyperbolicSpace, columns
from .ring import kernel_basis, matmul, residue_rank
from .stabilizer import StabilizerParams, build_stabilizer_element


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unit(ring, rng) -> int:
    return int(rng_from(rng).choice(ring.units()))


def random_isotropic_sequence(space: HyperbolicSpace, k: int, rng) -> tuple:
    """Uniform element of IU_k(R^2n) by sequential rejection sampling."""
    rng = rng_from(rng)
    ring = space.ring
    mod = ring.modulus
    if k > space.n:
        raise ValueError(f"no isotropic unimodular sequence of length {k} for n = {space.n}")
    seq: list = []
    for _ in range(k):
        S = columns(space, seq)
        K = np.eye(space.dim, dtype=np.int64) if not seq else kernel_basis(ring, matmul(ring, S.T, space.psi))
        while True:
            V = (rng.integers(0, mod, (64, K.shape[1])) @ K.T) % mod
            norms = 2 * (V[:, 0::2] * V[:, 1::2]).sum(axis=1) % mod
            found = None
            for v in V[norms == 0]:
                if residue_rank(ring, np.column_stack([S, v])) == len(seq) + 1:
                    found = tuple(int(t) for t in v)
                    break
            if found is not None:
                seq.append(found)
                break
    return tuple(seq)


def random_stabilizer_element(space: HyperbolicSpace, k: int, rng) -> np.ndarray:
    """Uniform element of the stabilizer of (e_1, ..., e_k)."""
    rng = rng_from(rng)
    mod = space.ring.modulus
    m = space.n - k
    B = random_orthogonal(HyperbolicSpace(space.ring, m), rng)
    upper = rng.integers(0, mod, k * (k - 1) // 2)
    x = rng.integers(0, mod, (k, 2 * m))
    return build_stabilizer_element(StabilizerParams.from_free(space, k, upper, x, B))


def random_orthogonal(space: HyperbolicSpace, rng) -> np.ndarray:
    """Uniform element of O_{n,n}: a transitivity witness for a uniform
    Lagrangian frame, times a uniform element of the frame's stabilizer."""
    from .witt import transitivity_witness

    rng = rng_from(rng)
    if space.n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    frame = random_isotropic_sequence(space, space.n, rng)
    g = transitivity_witness(space, frame)
    n = space.n
    t = build_stabilizer_element(StabilizerParams.from_free(
        space, n, rng.integers(0, space.ring.modulus, n * (n - 1) // 2)))
    return matmul(space.ring, g, t)


def random_chain(space: HyperbolicSpace, degree: int, terms: int, rng, coef: int = 3):
    """A chain with up to ``terms`` random generators and coefficients in [-coef, coef]."""
    from .complex import Chain

    rng = rng_from(rng)
    out = Chain(degree)
    for _ in range(terms):
        c = int(rng.integers(-coef, coef + 1))
        out += Chain.generator(random_isotropic_sequence(space, degree, rng), c)
    return out


def random_cycle(space: HyperbolicSpace, degree: int, terms: int, rng, coef: int = 3):
    """The boundary of a random chain of degree ``degree + 1``."""
    from .complex import apply_d

    return apply_d(random_chain(space, degree + 1, terms, rng, coef))
