"""Compiled vs numpy kernel throughput.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per workload for each available backend and
the speed-up of the compiled one. Outputs are checked to be identical first.
"""
import argparse
import timeit

import numpy as np

from dsfft import kernels
from dsfft.butterfly import ComplexFx, butterfly_ds
from dsfft.fft_core import CONVENTIONAL, fft_execute, plan_fft


def workloads(rng):
    plan64 = plan_fft(64)
    plan1k = plan_fft(1024)
    plan1k_conv = plan_fft(1024, impl=CONVENTIONAL)
    table = plan64.twiddles[5].wr_table
    x = rng.integers(-2**15, 2**15, 1_000_000)
    b = rng.integers(-2**15, 2**15, (4, 1_000_000))
    tw = rng.integers(0, 32, 1_000_000)
    sig = rng.integers(-2**15, 2**15, (200, 1024, 2))
    return {
        "scml_mul 1e6 words": lambda k: kernels.scml_mul_batch(table, x, k),
        "butterfly_ds 1e6": lambda k: kernels.butterfly_batch(*b, plan64.twiddles, plan64.fmt,
                                                              plan64.requant, True, tw, k),
        "butterfly_conv 1e6": lambda k: kernels.butterfly_batch(*b, plan64.twiddles, plan64.fmt,
                                                                plan64.requant, False, tw, k),
        "fft_ds n=1024 x200": lambda k: kernels.fft_batch(plan1k, sig[..., 0], sig[..., 1], kern=k),
        "fft_conv n=1024 x200": lambda k: kernels.fft_batch(plan1k_conv, sig[..., 0], sig[..., 1], kern=k),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(u, v) for u, v in zip(a, b))
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = kernels.available_backends()
    backends = {n: kernels.get_backend(n) for n in names}
    rng = np.random.default_rng(0)
    print(f"{'workload':<24}" + "".join(f"{n + ' [s]':>14}" for n in names)
          + ("   speed-up" if len(names) > 1 else ""))
    for label, fn in workloads(rng).items():
        results = {n: fn(k) for n, k in backends.items()}
        ref = results[names[0]]
        assert all(same(ref, r) for r in results.values()), f"{label}: backends disagree"
        times = {n: min(timeit.repeat(lambda k=k: fn(k), number=1, repeat=args.repeat))
                 for n, k in backends.items()}
        row = f"{label:<24}" + "".join(f"{times[n]:>14.4f}" for n in names)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>10.1f}x"
        print(row)
    # object-level reference path, for scale
    plan = plan_fft(64)
    x = [ComplexFx.from_raw(int(r), int(i), plan.fmt) for r, i in rng.integers(-2**15, 2**15, (64, 2))]
    t = min(timeit.repeat(lambda: fft_execute(plan, x), number=1, repeat=args.repeat))
    print(f"\nobject-level fft_execute n=64: {t * 1e3:.1f} ms per transform")
    a, bb = x[0], x[1]
    t = min(timeit.repeat(lambda: butterfly_ds(a, bb, plan.twiddles[3], plan.requant),
                          number=2000, repeat=args.repeat)) / 2000
    print(f"object-level butterfly_ds:      {t * 1e6:.1f} us per call")


if __name__ == "__main__":
    main()
