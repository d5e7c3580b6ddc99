"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are called on identical inputs; their outputs are checked for
equality before timing.
"""
import argparse
import time

import numpy as np

from memb import _pykernels, kernels
from memb.fields import FqField
from memb.groups import build_group

try:
    from memb import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    S5 = build_group("S5")
    S6 = build_group("S6")
    yield "closure_mask S5 <(12),(12345)>", lambda impl: kernels.closure_mask(
        S5.mul, [S5.element("(1,2)"), S5.element("(1,2,3,4,5)")], impl=impl)
    yield "closure_mask S6 <(12),(123456)>", lambda impl: kernels.closure_mask(
        S6.mul, [S6.element("(1,2)"), S6.element("(1,2,3,4,5,6)")], impl=impl)
    for q_p, q_k, n in [(5, 2, 60), (7, 2, 120)]:
        F = FqField(q_p, q_k)
        m = F.random_elements(rng, (n, 2 * n))
        yield f"fq_rref F{F.q} {n}x{2 * n}", lambda impl, m=m, F=F: kernels.fq_rref(m, F.tables, impl=impl)
        a = F.random_elements(rng, (n, n))
        b = F.random_elements(rng, (n, n))
        yield f"fq_matmul F{F.q} {n}x{n}", lambda impl, a=a, b=b, F=F: kernels.fq_matmul(a, b, F.tables, impl=impl)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"default backend: {kernels.BACKEND}")
    if _ckernels is None:
        print("compiled extension not available; timing the fallback only")
    print(f"{'kernel':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in cases():
        tp = best_of(lambda: fn(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:40s} {tp:10.5f} {'-':>10s} {'-':>8s}")
            continue
        ref, got = fn(_pykernels), fn(_ckernels)
        if isinstance(ref, tuple):
            assert np.array_equal(ref[0], got[0]) and ref[1] == got[1], name
        else:
            assert np.array_equal(ref, got), name
        tc = best_of(lambda: fn(_ckernels), args.repeat)
        print(f"{name:40s} {tp:10.5f} {tc:10.5f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
