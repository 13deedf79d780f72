"""N-point radix-2 decimation-in-time FFT built from the fixed-point butterflies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .butterfly import (
    ComplexFx,
    RequantPolicy,
    TwiddleTables,
    butterfly_conventional,
    butterfly_ds,
    default_policy,
    make_twiddle_tables,
)
from .digit_slicing import A1, SliceParams
from .fixedpoint import NEAREST_EVEN, FxWord, QFormat, fx_from_real

CONVENTIONAL = "conventional"
DIGIT_SLICING = "digit_slicing"
IMPLEMENTATIONS = (CONVENTIONAL, DIGIT_SLICING)


class FftError(ValueError):
    pass


def log2_exact(n: int) -> int:
    if not isinstance(n, int) or n < 1 or n & (n - 1):
        raise FftError(f"length must be a power of two, got {n!r}")
    return n.bit_length() - 1


def bit_reverse(i: int, bits: int) -> int:
    r = 0
    for _ in range(bits):
        r = (r << 1) | (i & 1)
        i >>= 1
    return r


def bit_reverse_permute(v: Sequence) -> list:
    m = log2_exact(len(v))
    return [v[bit_reverse(i, m)] for i in range(len(v))]


def quantize_twiddle(k: int, n: int, fmt: QFormat) -> tuple[FxWord, FxWord]:
    """(cos, sin) of 2*pi*k/n, so that W = wr - j*wi = exp(-2j*pi*k/n)."""
    angle = 2.0 * math.pi * k / n
    return (
        fx_from_real(math.cos(angle), fmt, NEAREST_EVEN),
        fx_from_real(math.sin(angle), fmt, NEAREST_EVEN),
    )


@dataclass(frozen=True)
class FftPlan:
    n: int
    fmt: QFormat
    slice: SliceParams
    twiddles: tuple[TwiddleTables, ...]
    requant: RequantPolicy
    impl: str
    tw_fmt: QFormat = field(default=None)

    @property
    def stages(self) -> int:
        return log2_exact(self.n)

    @property
    def scale(self) -> float:
        """Factor the fixed-point output carries relative to the true DFT."""
        return 2.0 ** -(self.stages * self.requant.extra_shift)

    @property
    def table_count(self) -> int:
        return 2 * len(self.twiddles)

    def kernel_arrays(self):
        return self._kernel_arrays

    @cached_property
    def _kernel_arrays(self):
        wr = np.array([t.wr.raw for t in self.twiddles], dtype=np.int64)
        wi = np.array([t.wi.raw for t in self.twiddles], dtype=np.int64)
        roms_r = np.array([t.wr_table.roms for t in self.twiddles], dtype=np.int64)
        roms_i = np.array([t.wi_table.roms for t in self.twiddles], dtype=np.int64)
        return wr, wi, roms_r, roms_i


def plan_fft(
    n: int,
    fmt: QFormat = QFormat(16, 15),
    slice: Optional[SliceParams] = None,
    requant: Optional[RequantPolicy] = None,
    impl: str = DIGIT_SLICING,
    tw_fmt: Optional[QFormat] = None,
) -> FftPlan:
    """Quantize the n/2 twiddles and build their SCML banks.

    Defaults: 4-bit slices covering ``fmt``, twiddles in the datapath format,
    truncating/saturating half-scaling requantization back to ``fmt``.
    """
    log2_exact(n)
    if n < 2:
        raise FftError("transform size must be at least 2")
    if impl not in IMPLEMENTATIONS:
        raise FftError(f"unknown implementation {impl!r}")
    if slice is None:
        if fmt.width % 4:
            raise FftError(f"no default slicing for {fmt}; pass SliceParams")
        slice = SliceParams(4, fmt.width // 4, A1)
    if impl == DIGIT_SLICING and slice.p * slice.b != fmt.width:
        raise FftError(f"slicing p={slice.p}, b={slice.b} does not cover {fmt}")
    tw_fmt = tw_fmt or QFormat(fmt.width, fmt.width - 1)
    requant = requant or default_policy(fmt)
    if requant.out_fmt != fmt:
        raise FftError("in-place stages need the requant output format to equal the input format")
    twiddles = tuple(
        make_twiddle_tables(*quantize_twiddle(k, n, tw_fmt), slice) for k in range(n // 2)
    )
    return FftPlan(n, fmt, slice, twiddles, requant, impl, tw_fmt)


def fft_execute(plan: FftPlan, x: Sequence[ComplexFx]) -> list[ComplexFx]:
    if len(x) != plan.n:
        raise FftError(f"expected {plan.n} samples, got {len(x)}")
    for z in x:
        if z.fmt != plan.fmt:
            raise FftError(f"sample format {z.fmt} does not match plan {plan.fmt}")
    v = bit_reverse_permute(list(x))
    n = plan.n
    span = 1
    while span < n:
        stride = n // (2 * span)
        for start in range(0, n, 2 * span):
            for j in range(span):
                tw = plan.twiddles[j * stride]
                a, bb = v[start + j], v[start + j + span]
                if plan.impl == DIGIT_SLICING:
                    xo, yo = butterfly_ds(a, bb, tw, plan.requant)
                else:
                    xo, yo = butterfly_conventional(a, bb, tw.w, plan.requant)
                v[start + j], v[start + j + span] = xo, yo
        span *= 2
    return v


def dft_reference(x, n: Optional[int] = None) -> np.ndarray:
    """Direct O(n^2) DFT in double precision."""
    x = np.asarray(x, dtype=complex)
    n = len(x) if n is None else n
    if len(x) != n:
        raise FftError(f"expected {n} samples, got {len(x)}")
    k = np.arange(n)
    # reduce k*m mod n before scaling keeps the angles exact for large n
    w = np.exp(-2j * np.pi * ((np.outer(k, k) % n) / n))
    return w @ x


@dataclass(frozen=True)
class ErrorMetrics:
    max_abs: float
    rms: float
    snr_db: float


def to_complex_array(z: Sequence[ComplexFx]) -> np.ndarray:
    return np.array([complex(v) for v in z], dtype=complex)


def fft_error_report(fixed_out, ref_out, plan: FftPlan) -> ErrorMetrics:
    """Compare a fixed-point spectrum with an unscaled reference spectrum.

    ``fixed_out`` may be a sequence of :class:`ComplexFx` or a complex array.
    SNR is +inf when the error is exactly zero.
    """
    if len(fixed_out) != len(ref_out):
        raise FftError(f"length mismatch: {len(fixed_out)} vs {len(ref_out)}")
    if len(fixed_out) and isinstance(fixed_out[0], ComplexFx):
        got = to_complex_array(fixed_out)
    else:
        got = np.asarray(fixed_out, dtype=complex)
    ref = np.asarray(ref_out, dtype=complex) * plan.scale
    err = got - ref
    if len(err) == 0:
        return ErrorMetrics(0.0, 0.0, math.inf)
    err_energy = float(np.sum(np.abs(err) ** 2))
    sig_energy = float(np.sum(np.abs(ref) ** 2))
    if err_energy == 0.0:
        snr = math.inf
    elif sig_energy == 0.0:
        snr = -math.inf
    else:
        snr = 10.0 * math.log10(sig_energy / err_energy)
    return ErrorMetrics(
        float(np.max(np.abs(err))), math.sqrt(err_energy / len(err)), snr
    )

