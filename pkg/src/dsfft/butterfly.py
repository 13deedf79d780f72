"""Radix-2 DIT butterfly: X = A + W*B, Y = A - W*B.

The twiddle is held as two real constants with W = wr - j*wi. Both butterfly
flavours compute the four real products at full precision, add and subtract
exactly, and quantize once at the outputs, so they agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .digit_slicing import SliceParams
from .fixedpoint import (
    SATURATE,
    TRUNCATE,
    FixedPointError,
    FxWord,
    QFormat,
    fx_add,
    fx_align,
    fx_mul_full,
    fx_requantize,
    fx_sub,
    qformat,
)
from .scml import ScmlTable, build_table, scml_mul

NO_SHIFT = "none"
HALF = "half"


@dataclass(frozen=True)
class ComplexFx:
    re: FxWord
    im: FxWord

    def __post_init__(self):
        if self.re.fmt != self.im.fmt:
            raise FixedPointError(f"real/imag formats differ: {self.re.fmt} vs {self.im.fmt}")

    @property
    def fmt(self) -> QFormat:
        return self.re.fmt

    @classmethod
    def from_raw(cls, re: int, im: int, fmt: QFormat) -> "ComplexFx":
        return cls(FxWord(re, fmt), FxWord(im, fmt))

    @property
    def raw(self) -> tuple[int, int]:
        return self.re.raw, self.im.raw

    def __complex__(self):
        return complex(float(self.re), float(self.im))


@dataclass(frozen=True)
class TwiddleTables:
    wr: FxWord
    wi: FxWord
    wr_table: ScmlTable
    wi_table: ScmlTable

    @property
    def w(self) -> tuple[FxWord, FxWord]:
        return self.wr, self.wi


def make_twiddle_tables(wr: FxWord, wi: FxWord, params: SliceParams) -> TwiddleTables:
    return TwiddleTables(wr, wi, build_table(wr, params), build_table(wi, params))


@dataclass(frozen=True)
class RequantPolicy:
    out_fmt: QFormat
    rounding: str = TRUNCATE
    overflow: str = SATURATE
    stage_shift: str = HALF

    def __post_init__(self):
        if self.stage_shift not in (NO_SHIFT, HALF):
            raise ValueError(f"stage_shift must be 'none' or 'half', got {self.stage_shift!r}")

    @property
    def extra_shift(self) -> int:
        return 1 if self.stage_shift == HALF else 0

    def apply(self, x: FxWord) -> FxWord:
        if x.fmt.width < self.out_fmt.width:
            raise FixedPointError(f"output {self.out_fmt} wider than datapath word {x.fmt}")
        if self.extra_shift:
            # halving is exact: reinterpret with one more fraction bit
            x = FxWord(x.raw, qformat(x.fmt.width + 1, x.fmt.frac + 1))
        return fx_requantize(x, self.out_fmt, self.overflow, self.rounding)


def default_policy(fmt: QFormat) -> RequantPolicy:
    return RequantPolicy(fmt)


def _combine(a: ComplexFx, wb_re: FxWord, wb_im: FxWord, q: Optional[RequantPolicy]):
    ar = fx_align(a.re, wb_re.fmt.frac)
    ai = fx_align(a.im, wb_re.fmt.frac)
    xr, xi = fx_add(ar, wb_re), fx_add(ai, wb_im)
    yr, yi = fx_sub(ar, wb_re), fx_sub(ai, wb_im)
    if q is not None:
        xr, xi, yr, yi = (q.apply(v) for v in (xr, xi, yr, yi))
    return ComplexFx(xr, xi), ComplexFx(yr, yi)


def _check(a: ComplexFx, bb: ComplexFx) -> None:
    if a.fmt != bb.fmt:
        raise FixedPointError(f"butterfly inputs differ in format: {a.fmt} vs {bb.fmt}")


def butterfly_conventional(
    a: ComplexFx,
    bb: ComplexFx,
    w: tuple[FxWord, FxWord],
    q: Optional[RequantPolicy],
) -> tuple[ComplexFx, ComplexFx]:
    """Four real multipliers and two adders for W*B, then add/sub with A.

    ``q=None`` keeps the outputs at full precision.
    """
    _check(a, bb)
    wr, wi = w
    if wr.fmt != wi.fmt:
        raise FixedPointError("twiddle parts must share a format")
    p_rr = fx_mul_full(wr, bb.re)
    p_ii = fx_mul_full(wi, bb.im)
    p_ri = fx_mul_full(wr, bb.im)
    p_ir = fx_mul_full(wi, bb.re)
    return _combine(a, fx_add(p_rr, p_ii), fx_sub(p_ri, p_ir), q)


def butterfly_ds(
    a: ComplexFx,
    bb: ComplexFx,
    t: TwiddleTables,
    q: Optional[RequantPolicy],
) -> tuple[ComplexFx, ComplexFx]:
    """Same butterfly with every product taken from the SCML ROM banks."""
    _check(a, bb)
    p_rr = scml_mul(t.wr_table, bb.re)
    p_ii = scml_mul(t.wi_table, bb.im)
    p_ri = scml_mul(t.wr_table, bb.im)
    p_ir = scml_mul(t.wi_table, bb.re)
    return _combine(a, fx_add(p_rr, p_ii), fx_sub(p_ri, p_ir), q)
