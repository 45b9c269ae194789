"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--full]

Each workload runs on both backends; counts must agree.  ``--full`` adds the
complete 3^16 scan of 4 x 4 matrices over F_3 (slow on the numpy backend).
"""

import argparse
import time

import numpy as np

from isostab import kernels
from isostab.complex import isotropic_vectors, iu_array
from isostab.forms import HyperbolicSpace
from isostab.groups import fixing_template
from isostab.ring import Ring


def timed(fn, repeat=3):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def scan(n, k, modulus, impl):
    T = fixing_template(n, k)
    return kernels.count_isometries(T, modulus, n, impl=impl)[0]


def extend(space, length, impl):
    prefix = np.ascontiguousarray(iu_array(space, length - 1))
    cands = isotropic_vectors(space)
    return len(kernels.extend_sequences(prefix, cands, space.ring.p, space.ring.modulus, impl=impl))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args()
    try:
        cy = kernels.backend("cython")
    except ImportError:
        print("compiled backend not built; only the numpy backend is available")
        return
    py = kernels.backend("python")

    F3 = Ring(3)
    work = [
        ("scan St(e_1) in O_{2,2}(F_3), 3^12", lambda impl: scan(2, 1, 3, impl), 3),
        ("scan O_{1,1}(Z/25), 25^4", lambda impl: scan(1, 0, 25, impl), 3),
        ("extend IU_1 -> IU_2, F_3, n = 3", lambda impl: extend(HyperbolicSpace(F3, 3), 2, impl), 3),
        ("extend IU_2 -> IU_3, F_3, n = 3", lambda impl: extend(HyperbolicSpace(F3, 3), 3, impl), 1),
    ]
    if args.full:
        work.append(("scan O_{2,2}(F_3), 3^16", lambda impl: scan(2, 0, 3, impl), 1))

    print(f"{'workload':44s} {'count':>9s} {'cython s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, fn, repeat in work:
        tc, nc = timed(lambda: fn(cy), repeat)
        tp, npy = timed(lambda: fn(py), repeat)
        assert nc == npy, f"backends disagree on {name}: {nc} != {npy}"
        print(f"{name:44s} {nc:9d} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
