"""The stabilizer T_k of (e_1, ..., e_k) in O_{n,n}.

An element of T_k is determined by data (c, x, B): a k x k grid c, k columns
x_i in R^{2(n-k)} and B in O_{n-k,n-k}.  In the basis e_1, f_1, ..., the
matrix has e_i-columns equal to e_i, f_j-column carrying c^i_j in the e_i
rows and x_j in the bottom block, and bottom block columns carrying u_i in
the e_i rows and B below.  The row vectors u_i = -tB psi x_i are never
stored.  The constraints are

    c^i_j + c^j_i + <x_i, x_j> = 0,     B in O_{n-k,n-k}.

Free parameters are the x_i, B and c^i_j for i < j; the diagonal is
c^i_i = -<x_i, x_i>/2 and c^j_i = -c^i_j - <x_i, x_j> for i < j.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .forms import D_matrix, HyperbolicSpace, check_orthogonal, inner, orthogonal_inverse, psi
from .ring import EnumerationCapExceeded, Ring, identity, matmul, reduce


class ParameterError(ValueError):
    """Stabilizer data violating one of the defining equations."""


class NotInStabilizer(ValueError):
    pass


class PatternViolation(ValueError):
    """A fixes e_1..e_k but its forced rows/columns do not have the expected shape."""


@dataclass
class StabilizerParams:
    space: HyperbolicSpace
    k: int
    c: np.ndarray
    x: np.ndarray  # shape (k, 2(n-k)); row i is x_{i+1}
    B: np.ndarray

    def __post_init__(self) -> None:
        ring = self.space.ring
        m = self.space.n - self.k
        if not 0 <= self.k <= self.space.n:
            raise ParameterError(f"k = {self.k} out of range")
        self.c = reduce(ring, np.asarray(self.c).reshape(self.k, self.k))
        self.x = reduce(ring, np.asarray(self.x).reshape(self.k, 2 * m))
        self.B = reduce(ring, np.asarray(self.B).reshape(2 * m, 2 * m))

    @property
    def rest(self) -> HyperbolicSpace:
        return HyperbolicSpace(self.space.ring, self.space.n - self.k)

    def u(self, i: int) -> np.ndarray:
        """u_i = -tB psi x_i (0-based i)."""
        ring = self.space.ring
        return (-matmul(ring, self.B.T, psi(self.rest.n), self.x[i])) % ring.modulus

    def violations(self) -> list[str]:
        out = []
        rest = self.rest
        for i in range(self.k):
            for j in range(i, self.k):
                s = (int(self.c[i, j]) + int(self.c[j, i]) + inner(rest, self.x[i], self.x[j])) % rest.ring.modulus
                if s:
                    out.append(f"c[{i + 1},{j + 1}] + c[{j + 1},{i + 1}] + <x_{i + 1}, x_{j + 1}> = {s} != 0")
        if not check_orthogonal(rest.ring, self.B):
            out.append("B is not in O_{n-k,n-k}")
        return out

    def check(self) -> None:
        bad = self.violations()
        if bad:
            raise ParameterError("; ".join(bad))

    def scaled(self, a: int) -> "StabilizerParams":
        """Closed form of the local action: (c, x, B) -> (a^2 c, a x, B)."""
        ring = self.space.ring
        a = ring.reduce(a)
        return StabilizerParams(self.space, self.k, self.c * (a * a % ring.modulus), self.x * a, self.B)

    def key(self) -> tuple:
        return (self.c.tobytes(), self.x.tobytes(), self.B.tobytes())

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerParams):
            return NotImplemented
        return (self.space == other.space and self.k == other.k
                and np.array_equal(self.c, other.c) and np.array_equal(self.x, other.x)
                and np.array_equal(self.B, other.B))

    @classmethod
    def from_free(cls, space: HyperbolicSpace, k: int, upper=(), x=None, B=None) -> "StabilizerParams":
        """Complete free data: ``upper`` lists c^i_j for i < j in row-major order."""
        ring = space.ring
        m = space.n - k
        try:
            x = np.zeros((k, 2 * m), dtype=np.int64) if x is None else reduce(ring, np.asarray(x).reshape(k, 2 * m))
            B = identity(2 * m) if B is None else reduce(ring, np.asarray(B).reshape(2 * m, 2 * m))
        except ValueError as exc:
            raise ParameterError(f"wrong shape for k = {k}, n = {space.n}: {exc}") from exc
        upper = list(upper)
        pairs = list(itertools.combinations(range(k), 2))
        if len(upper) != len(pairs):
            raise ParameterError(f"expected {len(pairs)} free c-entries, got {len(upper)}")
        rest = HyperbolicSpace(ring, m)
        half = ring.half()
        c = np.zeros((k, k), dtype=np.int64)
        for i in range(k):
            c[i, i] = (-half * inner(rest, x[i], x[i])) % ring.modulus
        for (i, j), val in zip(pairs, upper):
            c[i, j] = ring.reduce(val)
            c[j, i] = (-int(val) - inner(rest, x[i], x[j])) % ring.modulus
        return cls(space, k, c, x, B)

    def free_upper(self) -> tuple:
        return tuple(int(self.c[i, j]) for i, j in itertools.combinations(range(self.k), 2))


def build_stabilizer_element(params: StabilizerParams) -> np.ndarray:
    params.check()
    space, k = params.space, params.k
    ring = space.ring
    dim = space.dim
    A = np.zeros((dim, dim), dtype=np.int64)
    for i in range(k):
        A[2 * i, 2 * i] = 1
        A[2 * i + 1, 2 * i + 1] = 1
        for j in range(k):
            A[2 * i, 2 * j + 1] = params.c[i, j]
        A[2 * k:, 2 * i + 1] = params.x[i]
        A[2 * i, 2 * k:] = params.u(i)
    A[2 * k:, 2 * k:] = params.B
    A %= ring.modulus
    assert check_orthogonal(ring, A)
    return A


def read_stabilizer_params(ring: Ring, A, k: int) -> StabilizerParams:
    A = reduce(ring, A)
    n = A.shape[0] // 2
    space = HyperbolicSpace(ring, n)
    if not 0 <= k <= n:
        raise ValueError(f"k = {k} out of range for n = {n}")
    for i in range(k):
        if not np.array_equal(A[:, 2 * i], np.asarray(space.e(i + 1))):
            raise NotInStabilizer(f"A does not fix e_{i + 1}")
    for i in range(k):
        expected = np.zeros(2 * n, dtype=np.int64)
        expected[2 * i + 1] = 1
        if not np.array_equal(A[2 * i + 1], expected):
            raise PatternViolation(f"row f_{i + 1} is {A[2 * i + 1].tolist()}, expected {expected.tolist()}")
    c = A[0:2 * k:2, 1:2 * k:2].copy()
    x = A[2 * k:, 1:2 * k:2].T.copy()
    B = A[2 * k:, 2 * k:].copy()
    params = StabilizerParams(space, k, c, x, B)
    bad = params.violations()
    for i in range(k):
        if not np.array_equal(A[2 * i, 2 * k:], params.u(i)):
            bad.append(f"u_{i + 1} + tB psi x_{i + 1} != 0")
    if bad:
        raise PatternViolation("; ".join(bad))
    return params


def rho(ring: Ring, A, k: int) -> np.ndarray:
    """The projection T_k -> O_{n-k,n-k}, A -> B."""
    return read_stabilizer_params(ring, A, k).B


def is_in_Lk(ring: Ring, A, k: int) -> bool:
    B = rho(ring, A, k)
    return np.array_equal(B, identity(B.shape[0]))


def local_action(ring: Ring, a: int, A, k: int) -> np.ndarray:
    """Conjugation by D_{a,k}, checked against the closed form on (c, x, u, B)."""
    A = reduce(ring, A)
    space = HyperbolicSpace(ring, A.shape[0] // 2)
    D = D_matrix(space, a, k)
    conj = matmul(ring, D, A, orthogonal_inverse(ring, D))
    params = read_stabilizer_params(ring, A, k)
    closed = build_stabilizer_element(params.scaled(a))
    if not np.array_equal(conj, closed):
        raise AssertionError(f"conjugation by D_(a={a},k={k}) disagrees with closed form")
    scaled = read_stabilizer_params(ring, conj, k)
    for i in range(k):
        if not np.array_equal(scaled.u(i), (params.u(i) * a) % ring.modulus):
            raise AssertionError(f"u_{i + 1} is not scaled by a = {a}")
    return conj


def iter_params(space: HyperbolicSpace, k: int, B_list=None, *, cap: int = 10**7):
    """Every valid StabilizerParams for T_k.  B ranges over ``B_list``
    (default: the identity only, i.e. the kernel L_k)."""
    ring = space.ring
    m = space.n - k
    if B_list is None:
        B_list = [identity(2 * m)]
    nfree = k * (k - 1) // 2 + 2 * m * k
    total = ring.modulus**nfree * len(B_list)
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    for B in B_list:
        for vals in itertools.product(range(ring.modulus), repeat=nfree):
            upper = vals[:k * (k - 1) // 2]
            x = np.array(vals[k * (k - 1) // 2:], dtype=np.int64).reshape(k, 2 * m)
            yield StabilizerParams.from_free(space, k, upper, x, B)


# -- the central extension R^(k choose 2) -> L_k -> (R^{2(n-k)})^k --------------

def kernel_element(space: HyperbolicSpace, k: int, upper) -> np.ndarray:
    """First arrow: free c-entries -> element of L_k with x = 0, B = 1."""
    return build_stabilizer_element(StabilizerParams.from_free(space, k, upper))


def kernel_coordinates(ring: Ring, A, k: int) -> tuple:
    return read_stabilizer_params(ring, A, k).free_upper()


def quotient_map(ring: Ring, A, k: int) -> np.ndarray:
    """Second arrow: element of L_k -> (x_1, ..., x_k)."""
    params = read_stabilizer_params(ring, A, k)
    if not np.array_equal(params.B, identity(params.B.shape[0])):
        raise NotInStabilizer("element is not in L_k")
    return params.x


@dataclass
class ExtensionReport:
    space: HyperbolicSpace
    k: int
    mode: str
    order: Optional[int]
    checks: dict = field(default_factory=dict)
    counterexample: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None and all(self.checks.values())

    def record(self, name: str, ok: bool, **witness) -> None:
        self.checks[name] = self.checks.get(name, True) and ok
        if not ok and self.counterexample is None:
            self.counterexample = {"check": name, **{k: _jsonable(v) for k, v in witness.items()}}

    def to_dict(self) -> dict:
        return {
            "ring": [self.space.ring.p, self.space.ring.k],
            "n": self.space.n,
            "k": self.k,
            "mode": self.mode,
            "order_L_k": self.order,
            "checks": self.checks,
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def central_extension_check(space: HyperbolicSpace, k: int, mode: str = "exhaustive",
                            samples: int = 10_000, seed: int = 0) -> ExtensionReport:
    """Verify the extension of L_k by its c-part: homomorphisms, exactness,
    centrality and the (b^2, b) equivariance under conjugation by D_{b,k}."""
    ring = space.ring
    mod = ring.modulus
    npairs = k * (k - 1) // 2
    m = space.n - k
    report = ExtensionReport(space, k, mode, None)
    units = ring.units()

    if mode == "exhaustive":
        elements = [build_stabilizer_element(pr) for pr in iter_params(space, k)]
        report.order = len(elements)
        kernel_coords = list(itertools.product(range(mod), repeat=npairs))
        pairs = [(A, Bm) for A in elements for Bm in elements]
        kpairs = [(c1, c2) for c1 in kernel_coords for c2 in kernel_coords]
        central = [(c, A) for c in kernel_coords for A in elements]
        equiv = [(b, A) for b in units for A in elements]
        members = elements
    elif mode == "sampled":
        rng = np.random.default_rng(seed)

        def rand_L():
            return build_stabilizer_element(StabilizerParams.from_free(
                space, k, rng.integers(0, mod, npairs), rng.integers(0, mod, (k, 2 * m))))

        report.order = mod ** (npairs + 2 * m * k)
        pairs = [(rand_L(), rand_L()) for _ in range(samples)]
        kpairs = [(tuple(rng.integers(0, mod, npairs)), tuple(rng.integers(0, mod, npairs)))
                  for _ in range(samples)]
        central = [(tuple(rng.integers(0, mod, npairs)), rand_L()) for _ in range(samples)]
        equiv = [(int(rng.choice(units)), rand_L()) for _ in range(samples)]
        members = [A for A, _ in pairs]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    # first arrow: a homomorphism, injective, landing in the kernel of the second
    for c1, c2 in kpairs:
        A1, A2 = kernel_element(space, k, c1), kernel_element(space, k, c2)
        csum = tuple((int(a) + int(b)) % mod for a, b in zip(c1, c2))
        report.record("first_arrow_homomorphism",
                      np.array_equal(matmul(ring, A1, A2), kernel_element(space, k, csum)), c1=c1, c2=c2)
        report.record("first_arrow_injective", kernel_coordinates(ring, A1, k) == tuple(int(v) % mod for v in c1), c=c1)
        report.record("composite_zero", not quotient_map(ring, A1, k).any(), c=c1)

    # second arrow: a homomorphism; L_k closed under products
    for A, Bm in pairs:
        AB = matmul(ring, A, Bm)
        ok = is_in_Lk(ring, AB, k)
        report.record("L_k_closed", ok, A=A, B=Bm)
        if ok:
            lhs = quotient_map(ring, AB, k)
            rhs = (quotient_map(ring, A, k) + quotient_map(ring, Bm, k)) % mod
            report.record("second_arrow_homomorphism", np.array_equal(lhs, rhs), A=A, B=Bm)

    # exactness in the middle: x = 0 forces A to be a kernel element
    for A in members:
        if not quotient_map(ring, A, k).any():
            report.record("exact_middle", np.array_equal(A, kernel_element(space, k, kernel_coordinates(ring, A, k))), A=A)
        else:
            report.record("exact_middle", True)

    # second arrow is onto: every x-tuple is hit
    if mode == "exhaustive":
        hit = {quotient_map(ring, A, k).tobytes() for A in members}
        report.record("second_arrow_surjective", len(hit) == mod ** (2 * m * k))
    else:
        for A in members[:min(len(members), 1000)]:
            x = quotient_map(ring, A, k)
            built = build_stabilizer_element(StabilizerParams.from_free(space, k, [0] * npairs, x))
            report.record("second_arrow_surjective", np.array_equal(quotient_map(ring, built, k), x), x=x)

    for c, A in central:
        N = kernel_element(space, k, c)
        report.record("central", np.array_equal(matmul(ring, N, A), matmul(ring, A, N)), c=c, A=A)

    for b, A in equiv:
        D = D_matrix(space, b, k)
        Dinv = orthogonal_inverse(ring, D)
        conj = matmul(ring, D, A, Dinv)
        report.record("quotient_weight_b", np.array_equal(quotient_map(ring, conj, k),
                                                          (quotient_map(ring, A, k) * b) % mod), b=b, A=A)
        c = kernel_coordinates(ring, A, k)
        N = kernel_element(space, k, c)
        Nconj = matmul(ring, D, N, Dinv)
        report.record("kernel_weight_b_squared",
                      np.array_equal(Nconj, kernel_element(space, k, tuple(v * b * b % mod for v in c))), b=b, c=c)
    return report


def orbit_stabilizer_audit(space: HyperbolicSpace, p: int, *, workers: int = 1, cap: int = 10**8) -> dict:
    """|IU_p| * |St(e_1..e_p)| against |O_{n,n}|, each counted independently."""
    from .complex import enumerate_iu
    from .groups import count_fixing, group_order

    ring = space.ring
    orbit = len(enumerate_iu(space, p, cap=cap))
    stab = count_fixing(ring, space.n, p, workers=workers, cap=cap)
    order = group_order(ring, space.n, workers=workers, cap=cap)
    return {
        "ring": [ring.p, ring.k],
        "n": space.n,
        "p": p,
        "orbit_size": {"value": orbit, "method": "enumeration"},
        "stabilizer_order": {"value": stab, "method": "enumeration"},
        "group_order": {"value": order, "method": "enumeration"},
        "product": orbit * stab,
        "passed": orbit * stab == order,
    }


def bijection_audit(space: HyperbolicSpace, k: int, *, workers: int = 1, cap: int = 10**8) -> dict:
    """Two-way check between parameter data and the scanned elements fixing e_1..e_k.

    Every scanned element must read back to valid data that rebuilds it, and
    every valid datum (B over the scanned O_{n-k,n-k}) must build a distinct
    element of the scan."""
    from .groups import elements_fixing

    ring = space.ring
    scanned = elements_fixing(ring, space.n, k, workers=workers, cap=cap)
    scanned_keys = {A.tobytes() for A in scanned}
    read_ok = True
    first_bad = None
    for A in scanned:
        try:
            ok = np.array_equal(build_stabilizer_element(read_stabilizer_params(ring, A, k)), A)
        except (ParameterError, PatternViolation, NotInStabilizer):
            ok = False
        if not ok and first_bad is None:
            first_bad = A.tolist()
        read_ok &= ok
    B_list = elements_fixing(ring, space.n - k, 0, workers=workers, cap=cap)
    built = [build_stabilizer_element(pr).tobytes() for pr in iter_params(space, k, B_list, cap=cap)]
    built_keys = set(built)
    return {
        "ring": [ring.p, ring.k],
        "n": space.n,
        "k": k,
        "scanned": {"value": len(scanned), "method": "enumeration"},
        "parametrized": {"value": len(built), "method": "enumeration"},
        "read_build_roundtrip": read_ok,
        "build_injective": len(built_keys) == len(built),
        "images_match": built_keys == scanned_keys,
        "counterexample": first_bad,
        "passed": read_ok and len(built_keys) == len(built) and built_keys == scanned_keys,
    }
