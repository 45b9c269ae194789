"""S(m)-sequences, the element s_m, exact matrix identities comparing
actions, the orbit-level d^1 and the chain map tau.

Every check here is an exact equality of matrices or chains.  Sampled
checks draw sample ``i`` from ``default_rng([seed, i])``, so results do not
depend on how samples are batched; the failure reported is the one with the
smallest sample index.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .complex import Chain, apply_d
from .forms import (
    B_matrix,
    D_matrix,
    HyperbolicSpace,
    apply,
    block_embed,
    check_orthogonal,
    check_similitude,
    is_isotropic_unimodular,
    orthogonal_inverse,
    pair_permutation,
    scalar_matrix,
)
from .ring import Ring, identity, inverse, matmul
from .sampling import random_isotropic_sequence, random_orthogonal, random_stabilizer_element
from .stabilizer import NotInStabilizer, PatternViolation, read_stabilizer_params


# -- S(m)-sequences and s_m ------------------------------------------------------

class GroupRingElem(dict):
    """Finite Z-combination of units, stored as {unit: coefficient}."""

    def __init__(self, ring: Ring, terms=None):
        super().__init__()
        self.ring = ring
        for u, c in (terms or {}).items():
            self.add(u, c)

    def add(self, u: int, c: int) -> None:
        u = self.ring.reduce(u)
        if not self.ring.is_unit(u):
            raise ValueError(f"{u} is not a unit")
        val = self.get(u, 0) + c
        if val:
            self[u] = val
        else:
            self.pop(u, None)

    def __str__(self) -> str:
        if not self:
            return "0"
        parts = []
        for u, c in sorted(self.items()):
            coef = "" if c == 1 else "-" if c == -1 else str(c)
            parts.append(f"{coef}<{u}>")
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class SMSequence:
    ring: Ring
    units: tuple

    def __post_init__(self) -> None:
        if not self.units:
            raise ValueError("an S(m)-sequence needs m >= 1")
        bad = _bad_subset(self.ring, self.units)
        if bad is not None:
            raise ValueError(f"partial sum over {bad} is not a unit")

    @property
    def m(self) -> int:
        return len(self.units)


def _bad_subset(ring: Ring, units) -> Optional[tuple]:
    for r in range(1, len(units) + 1):
        for I in itertools.combinations(range(len(units)), r):
            if not ring.is_unit(sum(units[i] for i in I)):
                return tuple(i + 1 for i in I)
    return None


def sm_search(ring: Ring, m: int) -> Optional[SMSequence]:
    """Lexicographically first S(m)-sequence, or None after exhaustive search."""
    if m < 1:
        raise ValueError("m must be >= 1")
    units = ring.units()

    def extend(prefix: list, sums: list) -> Optional[list]:
        # sums holds every nonempty partial sum of prefix
        if len(prefix) == m:
            return prefix
        for a in units:
            new = [a] + [(s + a) % ring.modulus for s in sums]
            if all(ring.is_unit(s) for s in new):
                found = extend(prefix + [a], sums + new)
                if found is not None:
                    return found
        return None

    found = extend([], [])
    return None if found is None else SMSequence(ring, tuple(found))


def sm_element(seq: SMSequence) -> GroupRingElem:
    """s_m = -sum over nonempty I of (-1)^|I| <a_I>."""
    out = GroupRingElem(seq.ring)
    for r in range(1, seq.m + 1):
        for I in itertools.combinations(seq.units, r):
            out.add(sum(I), -((-1) ** r))
    return out


def augmentation(e: GroupRingElem) -> int:
    return sum(e.values())


# -- exact identity suites ---------------------------------------------------------

@dataclass
class KappaReport:
    prop: str
    kappa: Optional[list]
    identities: dict = field(default_factory=dict)
    samples: int = 0
    seed: Optional[int] = None
    counterexample: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None and all(self.identities.values())

    def to_dict(self) -> dict:
        return {
            "prop": self.prop,
            "kappa": self.kappa,
            "identities": self.identities,
            "samples": self.samples,
            "seed": self.seed,
            "method": "identity",
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    return v


def _run(report: KappaReport, names: list, check: Callable, samples: int, seed: int,
         workers: int = 1) -> KappaReport:
    """Run ``check(rng, i) -> (results, witness)`` on every sample and merge."""
    report.samples = samples
    report.seed = seed
    for name in names:
        report.identities.setdefault(name, True)

    def one(i):
        return check(np.random.default_rng([seed, i]), i)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(one, range(samples)))
    else:
        outcomes = [one(i) for i in range(samples)]
    for i, (results, witness) in enumerate(outcomes):
        for name, ok in results.items():
            report.identities[name] = report.identities[name] and bool(ok)
            if not ok and report.counterexample is None:
                report.counterexample = {"identity": name, "seed": seed, "sample": i,
                                         **{k: _jsonable(v) for k, v in witness.items()}}
    return report


def _unit_check(ring: Ring, a: int) -> int:
    a = ring.reduce(a)
    ring.inv(a)
    return a


def kappa_check_global(ring: Ring, a: int, n: int, samples: int = 1000, seed: int = 0,
                       *, k: Optional[int] = None, workers: int = 1) -> KappaReport:
    """kappa = B_a: conjugation preserves O_{n,n}, B_a preserves IU_k and has
    associated unit a."""
    a = _unit_check(ring, a)
    space = HyperbolicSpace(ring, n)
    Ba = B_matrix(space, a)
    Ba_inv = inverse(ring, Ba)
    k = n if k is None else k
    report = KappaReport("global", Ba.tolist())
    names = ["conjugate_in_O", "preserves_IU", "associated_unit"]

    def check(rng, i):
        A = random_orthogonal(space, rng)
        v = random_isotropic_sequence(space, int(rng.integers(1, k + 1)), rng)
        conj = matmul(ring, Ba, A, Ba_inv)
        img = apply(ring, Ba, v)
        return ({
            "conjugate_in_O": check_orthogonal(ring, conj),
            "preserves_IU": is_isotropic_unimodular(space, img),
            "associated_unit": check_similitude(ring, Ba) == a,
        }, {"A": A, "v": v})

    return _run(report, names, check, samples, seed, workers)


def kappa_check_scaling(ring: Ring, a: int, n: int, samples: int = 1000, seed: int = 0,
                        *, k: Optional[int] = None, workers: int = 1) -> KappaReport:
    """kappa = D_{a,n}: B_{a^-2} = D_{a,n} scalar(a^-1), scalars act trivially by
    conjugation, and B_{a^-2} v = D_{a,n}(a^-1 v) on sequences."""
    a = _unit_check(ring, a)
    space = HyperbolicSpace(ring, n)
    ai = ring.inv(a)
    lhs = B_matrix(space, ai * ai)
    D = D_matrix(space, a, n)
    S = scalar_matrix(space, ai)
    S_inv = scalar_matrix(space, a)
    product_ok = np.array_equal(lhs, matmul(ring, D, S))
    k = n if k is None else k
    report = KappaReport("scaling", D.tolist())
    names = ["B_inverse_square_factorization", "scalar_conjugation_trivial", "phi_a_relation"]

    def check(rng, i):
        A = random_orthogonal(space, rng)
        v = random_isotropic_sequence(space, int(rng.integers(1, k + 1)), rng)
        scaled = tuple(tuple(ai * x % ring.modulus for x in w) for w in v)
        return ({
            "B_inverse_square_factorization": product_ok,
            "scalar_conjugation_trivial": np.array_equal(matmul(ring, S, A, S_inv), A),
            "phi_a_relation": apply(ring, lhs, v) == apply(ring, D, scaled),
        }, {"A": A, "v": v})

    return _run(report, names, check, samples, seed, workers)


def kappa_check_stabilizer(ring: Ring, a: int, k: int, n: int, samples: int = 1000, seed: int = 0,
                           *, elements: Optional[list] = None, workers: int = 1) -> KappaReport:
    """kappa = D_{a,k}: conjugation preserves T_k and D_{a,k}(a^-1 e_i) = e_i.

    With ``elements`` the check runs over that list instead of random samples."""
    a = _unit_check(ring, a)
    if not 0 <= k <= n:
        raise ValueError(f"k = {k} out of range for n = {n}")
    space = HyperbolicSpace(ring, n)
    D = D_matrix(space, a, k)
    D_inv = orthogonal_inverse(ring, D)
    ai = ring.inv(a)
    scaled_basis = tuple(tuple(ai * x % ring.modulus for x in space.e(i)) for i in range(1, k + 1))
    basis_ok = apply(ring, D, scaled_basis) == space.standard_sequence(k)
    report = KappaReport("stabilizer", D.tolist())
    names = ["conjugate_in_T_k", "basis_identity"]

    def check(rng, i):
        A = elements[i] if elements is not None else random_stabilizer_element(space, k, rng)
        conj = matmul(ring, D, A, D_inv)
        try:
            read_stabilizer_params(ring, conj, k)
            inside = check_orthogonal(ring, conj)
        except (NotInStabilizer, PatternViolation):
            inside = False
        return {"conjugate_in_T_k": inside, "basis_identity": basis_ok}, {"A": A}

    total = len(elements) if elements is not None else samples
    return _run(report, names, check, total, seed, workers)


# -- d^1 at the orbit level ------------------------------------------------------------

def d1_coinvariants(ring: Ring, n: int, p: int) -> tuple[int, list]:
    """The map Z -> Z induced by d on orbit classes of IU_p -> IU_(p-1).

    Each face of (e_1, ..., e_p) is certified to lie in the orbit of
    (e_1, ..., e_(p-1)) by a transitivity witness.  Returns the coefficient
    and the list of certificates (face index, witness matrix)."""
    from .witt import transitivity_witness

    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p = {p}, n = {n}")
    space = HyperbolicSpace(ring, n)
    std = space.standard_sequence(p)
    total = 0
    certs = []
    for i in range(p):
        face = std[:i] + std[i + 1:]
        g = transitivity_witness(space, face) if face else identity(space.dim)
        if not check_orthogonal(ring, g) or apply(ring, g, space.standard_sequence(p - 1)) != face:
            raise AssertionError(f"face {i + 1} is not certified to lie in the standard orbit")
        certs.append((i + 1, g))
        total += 1 if i % 2 == 0 else -1
    return total, certs


def d1_table(ring: Ring, n: int) -> list[int]:
    return [d1_coinvariants(ring, n, p)[0] for p in range(1, n + 1)]


def d1_permutation_matrix(space: HyperbolicSpace, p: int, i: int) -> np.ndarray:
    """Pair permutation sending (e_1, .., ^e_i, .., e_p) to (e_1, .., e_(p-1))."""
    perm = list(range(space.n))
    for j in range(p):
        perm[j] = p - 1 if j == i - 1 else (j if j < i - 1 else j - 1)
    return pair_permutation(space, perm)


def d1_permutation_check(ring: Ring, n: int, p: int, i: int, samples: int = 100, seed: int = 0,
                         *, workers: int = 1) -> KappaReport:
    if not 1 <= i <= p <= n:
        raise ValueError(f"need 1 <= i <= p <= n, got i = {i}, p = {p}, n = {n}")
    space = HyperbolicSpace(ring, n)
    A = d1_permutation_matrix(space, p, i)
    A_inv = orthogonal_inverse(ring, A)
    std = space.standard_sequence(p)
    seq_ok = apply(ring, A, std[:i - 1] + std[i:]) == space.standard_sequence(p - 1)
    in_O = check_orthogonal(ring, A)
    sub = HyperbolicSpace(ring, n - p)
    report = KappaReport("d1_permutation", A.tolist())
    names = ["A_in_O", "sequence_identity", "conjugation_identity"]

    def check(rng, s):
        B = random_orthogonal(sub, rng)
        eps = block_embed(ring, B, p)
        eps_iota = block_embed(ring, block_embed(ring, B, 1), p - 1)
        return ({
            "A_in_O": in_O,
            "sequence_identity": seq_ok,
            "conjugation_identity": np.array_equal(eps_iota, matmul(ring, A, eps, A_inv)),
        }, {"B": B})

    return _run(report, names, check, samples, seed, workers)


# -- the chain map tau -----------------------------------------------------------------

def _pad(v) -> tuple:
    """R^{2(n-2)} -> R^{2n}, prepending two zero pairs."""
    return (0, 0, 0, 0) + tuple(v)


def tau_vectors(space: HyperbolicSpace) -> tuple:
    m = space.ring.modulus
    e1, e2 = space.e(1), space.e(2)
    d = tuple((b - a) % m for a, b in zip(e1, e2))
    return e1, e2, d


def tau(c: Chain, space: HyperbolicSpace) -> Chain:
    """tau_0 - tau_1 + tau_2 with tau_0(v) = (e_1, e_2, v), tau_1(v) = (e_1, e_2 - e_1, v)
    and tau_2(v) = (e_2, e_2 - e_1, v), v padded into the last n-2 pairs."""
    if space.n < 2:
        raise ValueError("tau needs n >= 2")
    c.validate(HyperbolicSpace(space.ring, space.n - 2))
    e1, e2, d = tau_vectors(space)
    out = Chain(c.degree + 2)
    for seq, coef in c.terms.items():
        rest = tuple(_pad(v) for v in seq)
        out._add((e1, e2) + rest, coef)
        out._add((e1, d) + rest, -coef)
        out._add((e2, d) + rest, coef)
    out.validate(space)
    return out


def tau_commutes(c: Chain, space: HyperbolicSpace) -> bool:
    lhs = apply_d(tau(c, space))
    rhs = tau(apply_d(c), space) if c.degree else Chain(lhs.degree)
    return lhs == rhs


def tau_matrices(space: HyperbolicSpace) -> tuple[np.ndarray, np.ndarray]:
    """A: e_2 -> e_2 - e_1, f_1 -> f_1 + f_2;  B: e_1 -> e_2, e_2 -> e_2 - e_1,
    f_1 -> f_1 + f_2, f_2 -> -f_1.  Identity on the other pairs."""
    m = space.ring.modulus
    A = identity(space.dim)
    A[0, 2] = m - 1          # e_2 -> e_2 - e_1
    A[3, 1] = 1              # f_1 -> f_1 + f_2
    B = identity(space.dim)
    B[:, 0] = 0
    B[2, 0] = 1              # e_1 -> e_2
    B[0, 2] = m - 1          # e_2 -> e_2 - e_1
    B[3, 1] = 1              # f_1 -> f_1 + f_2
    B[:, 3] = 0
    B[1, 3] = m - 1          # f_2 -> -f_1
    return A % m, B % m


def tau_matrices_check(ring: Ring, n: int, samples: int = 100, seed: int = 0,
                       *, workers: int = 1) -> KappaReport:
    if n < 2:
        raise ValueError("need n >= 2")
    space = HyperbolicSpace(ring, n)
    A, B = tau_matrices(space)
    A_inv, B_inv = orthogonal_inverse(ring, A), orthogonal_inverse(ring, B)
    e1, e2, d = tau_vectors(space)
    static = {"A_in_O": check_orthogonal(ring, A), "B_in_O": check_orthogonal(ring, B)}
    seq_ok_A, seq_ok_B = True, True
    for p in range(2, n + 1):
        std = space.standard_sequence(p)
        seq_ok_A &= apply(ring, A, std) == (e1, d) + std[2:]
        seq_ok_B &= apply(ring, B, std) == (e2, d) + std[2:]
    static["A_sequence_identity"] = seq_ok_A
    static["B_sequence_identity"] = seq_ok_B
    report = KappaReport("tau_matrices", [A.tolist(), B.tolist()])
    names = list(static) + ["A_centralizes", "B_centralizes"]

    def check(rng, s):
        p = int(rng.integers(2, n + 1))
        M = random_orthogonal(HyperbolicSpace(ring, n - p), rng)
        eps = block_embed(ring, M, p)
        return ({
            **static,
            "A_centralizes": np.array_equal(matmul(ring, A, eps, A_inv), eps),
            "B_centralizes": np.array_equal(matmul(ring, B, eps, B_inv), eps),
        }, {"p": p, "M": M})

    return _run(report, names, check, samples, seed, workers)
