"""Derive the n=64 fixed-point FFT error envelope frozen in tests/data.

Runs 1000 random full-scale Q(16,15) inputs (re, im uniform in [-1, 1))
through the digit-slicing plan with half scaling and records the largest
absolute error against the scaled double-precision DFT of the same
quantized input.

    python tools/derive_error_envelope.py > tests/data/fft_error_envelope.json
"""
import json
import sys

import numpy as np

from dsfft import kernels
from dsfft.fft_core import dft_reference, plan_fft

N = 64
TRIALS = 1000
SEED = 20260101
SLACK = 1.25


def trial_errors(seed, trials=TRIALS, n=N):
    plan = plan_fft(n)
    rng = np.random.default_rng(seed)
    fmt = plan.fmt
    re = rng.integers(fmt.min_raw, fmt.max_raw + 1, (trials, n))
    im = rng.integers(fmt.min_raw, fmt.max_raw + 1, (trials, n))
    out_re, out_im = kernels.fft_batch(plan, re, im)
    lsb = 2.0 ** -fmt.frac
    x = (re + 1j * im) * lsb
    got = (out_re + 1j * out_im) * lsb
    errs = []
    for row in range(trials):
        ref = dft_reference(x[row], n) * plan.scale
        errs.append(float(np.max(np.abs(got[row] - ref))))
    return np.array(errs)


def main():
    errs = trial_errors(SEED)
    envelope = float(errs.max()) * SLACK
    json.dump({
        "n": N, "fmt": [16, 15], "trials": TRIALS, "seed": SEED,
        "observed_max_abs": float(errs.max()),
        "observed_mean_max_abs": float(errs.mean()),
        "slack": SLACK,
        "max_abs_envelope": envelope,
        "sanity_ceiling": 2.0 ** -6,
    }, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
