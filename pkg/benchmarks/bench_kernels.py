"""Time the compiled kernels against the pure-Python reference.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--degree 398]

Each kernel runs on identical inputs under both backends; outputs are
checked for equality before timings are reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from beauville.kernels import backends
from beauville.perm import CycleShape, StabilizerChain, random_class_element
from beauville.psl2 import PSL2Group


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def _cases(n: int, rng: np.random.Generator) -> dict:
    a = rng.permutation(n).astype(np.int32)
    b = rng.permutation(n).astype(np.int32)
    gens = np.stack([rng.permutation(n).astype(np.int32) for _ in range(3)])
    active = np.arange(3, dtype=np.int32)
    G = PSL2Group(n - 1)
    pgens = [G.to_perm(g) for g in G.generators()]
    chain = StabilizerChain(pgens, n)
    base = np.array(chain.base, dtype=np.int32)
    members = []
    for _ in range(50):
        w = pgens[0]
        for i in rng.integers(len(pgens), size=30):
            w = w * pgens[int(i)]
        members.append(w.images)
    x = random_class_element(CycleShape(3, n // 3 - 2, n - 3 * (n // 3 - 2)), rng).images
    m = 5
    k = n // m - 1
    y = random_class_element(CycleShape(2, n // 2 - 1, n - 2 * (n // 2 - 1)), rng).images

    def sift_all(impl):
        out = []
        for g in members:
            h = g.copy()
            out.append(impl.sift(h, base, chain._svs, chain._ginv2d, 0))
        return out

    def anneal(impl):
        yy = y.copy()
        res = impl.anneal_product(x.copy(), yy, m, n - m * k, 1, 2000, 0.5)
        return res, yy.tolist()

    def orbit(impl):
        sv = np.empty(n, dtype=np.int32)
        return impl.orbit_schreier(gens, active, 0, sv).tolist()

    return {
        "compose x1000": lambda impl: [impl.compose(a, b) for _ in range(1000)][-1].tolist(),
        "cycle_counts x100": lambda impl: [impl.cycle_counts(a) for _ in range(100)][-1].tolist(),
        "orbit_schreier x1": orbit,
        "sift 50 members": sift_all,
        "anneal 2000 steps": anneal,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--degree", type=int, default=398, help="q + 1 for a prime power q")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    impls = backends()
    if "cython" not in impls:
        raise SystemExit("compiled backend not built; run `pip install -e . --no-build-isolation`")
    cases = _cases(args.degree, np.random.default_rng(args.seed))
    print(f"degree {args.degree}, best of {args.repeat}")
    print(f"{'kernel':<22}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, fn in cases.items():
        if fn(impls["python"]) != fn(impls["cython"]):
            raise SystemExit(f"{name}: backends disagree")
        tp = _best(lambda: fn(impls["python"]), args.repeat)
        tc = _best(lambda: fn(impls["cython"]), args.repeat)
        print(f"{name:<22}{1000 * tp:>14.3f}{1000 * tc:>14.3f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
