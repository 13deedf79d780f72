"""Exact two's-complement fixed-point scalars.

Every value is a Python ``int`` raw word plus a :class:`QFormat`; nothing here
ever wraps silently. Arithmetic grows the format instead, and narrowing only
happens through :func:`fx_requantize` with an explicit policy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

NEAREST_EVEN = "nearest-even"
TRUNCATE = "truncate"
SATURATE = "saturate"
WRAP = "wrap"

ROUNDING_MODES = (NEAREST_EVEN, TRUNCATE)
OVERFLOW_MODES = (SATURATE, WRAP)

MAX_FRAC = 64


class FixedPointError(ValueError):
    pass


@dataclass(frozen=True)
class QFormat:
    """Q(width, frac): a ``width``-bit signed integer scaled by 2**-frac."""

    width: int
    frac: int
    min_raw: int = field(init=False, repr=False, compare=False)
    max_raw: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.width, int) or self.width < 2:
            raise FixedPointError(f"width must be an integer >= 2, got {self.width!r}")
        if not isinstance(self.frac, int) or self.frac < 0:
            raise FixedPointError(f"frac must be an integer >= 0, got {self.frac!r}")
        if self.frac > self.width - 1:
            raise FixedPointError(f"frac {self.frac} exceeds width - 1 = {self.width - 1}")
        if self.frac > MAX_FRAC:
            raise FixedPointError(f"more than {MAX_FRAC} fraction bits is not supported")
        object.__setattr__(self, "min_raw", -(1 << (self.width - 1)))
        object.__setattr__(self, "max_raw", (1 << (self.width - 1)) - 1)

    @property
    def lsb(self) -> float:
        return math.ldexp(1.0, -self.frac)

    def contains(self, raw: int) -> bool:
        return self.min_raw <= raw <= self.max_raw

    def __str__(self):
        return f"Q({self.width},{self.frac})"


@lru_cache(maxsize=None)
def qformat(width: int, frac: int) -> QFormat:
    """Interned :class:`QFormat` constructor for hot paths."""
    return QFormat(width, frac)


@dataclass(frozen=True)
class FxWord:
    raw: int
    fmt: QFormat

    def __post_init__(self):
        if type(self.raw) is not int:
            if not isinstance(self.raw, int) or isinstance(self.raw, bool):
                raise FixedPointError(f"raw must be an int, got {type(self.raw).__name__}")
            object.__setattr__(self, "raw", int(self.raw))
        if not self.fmt.min_raw <= self.raw <= self.fmt.max_raw:
            raise FixedPointError(
                f"raw {self.raw} outside {self.fmt} range [{self.fmt.min_raw}, {self.fmt.max_raw}]"
            )

    @property
    def value(self) -> Fraction:
        """Exact rational value."""
        return Fraction(self.raw, 1 << self.fmt.frac)

    def __float__(self):
        return fx_to_real(self)

    def __repr__(self):
        return f"FxWord({self.raw}, {self.fmt})"


def _check_rounding(rounding: str) -> None:
    if rounding not in ROUNDING_MODES:
        raise FixedPointError(f"unknown rounding mode {rounding!r}")


def _check_overflow(overflow: str) -> None:
    if overflow not in OVERFLOW_MODES:
        raise FixedPointError(f"unknown overflow mode {overflow!r}")


def round_shift(raw: int, shift: int, rounding: str = NEAREST_EVEN) -> int:
    """Divide ``raw`` by 2**shift (shift >= 0) with the given rounding."""
    if shift <= 0:
        return raw << -shift
    q = raw >> shift
    if rounding == TRUNCATE:
        return q
    rem = raw - (q << shift)
    half = 1 << (shift - 1)
    if rem > half or (rem == half and q & 1):
        q += 1
    return q


def fit_raw(raw: int, fmt: QFormat, overflow: str = SATURATE) -> int:
    if fmt.contains(raw):
        return raw
    if overflow == SATURATE:
        return fmt.max_raw if raw > 0 else fmt.min_raw
    mask = (1 << fmt.width) - 1
    raw &= mask
    return raw - (1 << fmt.width) if raw > fmt.max_raw else raw


def fx_from_real(r: float, fmt: QFormat, rounding: str = NEAREST_EVEN) -> FxWord:
    """Quantize a real number, saturating outside the representable range.

    Conversion goes through :class:`fractions.Fraction`, so the result is the
    exact rounding of the binary value of ``r``.
    """
    _check_rounding(rounding)
    if not math.isfinite(r):
        raise FixedPointError(f"cannot quantize non-finite value {r!r}")
    scaled = Fraction(r) * (1 << fmt.frac)
    if rounding == TRUNCATE:
        raw = math.floor(scaled)
    else:
        raw = round(scaled)  # Fraction.__round__ is round-half-even
    return FxWord(fit_raw(raw, fmt, SATURATE), fmt)


def fx_to_real(x: FxWord) -> float:
    return math.ldexp(float(x.raw), -x.fmt.frac)


def fx_mul_full(a: FxWord, b: FxWord) -> FxWord:
    fmt = qformat(a.fmt.width + b.fmt.width, a.fmt.frac + b.fmt.frac)
    return FxWord(a.raw * b.raw, fmt)


def _grown(a: FxWord, b: FxWord) -> QFormat:
    if a.fmt.frac != b.fmt.frac:
        raise FixedPointError(f"fraction bits differ: {a.fmt} vs {b.fmt}")
    return qformat(max(a.fmt.width, b.fmt.width) + 1, a.fmt.frac)


def fx_add(a: FxWord, b: FxWord) -> FxWord:
    return FxWord(a.raw + b.raw, _grown(a, b))


def fx_sub(a: FxWord, b: FxWord) -> FxWord:
    return FxWord(a.raw - b.raw, _grown(a, b))


def fx_align(x: FxWord, frac: int) -> FxWord:
    """Re-express ``x`` with ``frac`` fraction bits (frac >= current), exactly."""
    shift = frac - x.fmt.frac
    if shift < 0:
        raise FixedPointError("fx_align cannot drop fraction bits; use fx_requantize")
    return FxWord(x.raw << shift, qformat(x.fmt.width + shift, frac))


def fx_requantize(
    x: FxWord,
    fmt: QFormat,
    overflow: str = SATURATE,
    rounding: str = NEAREST_EVEN,
) -> FxWord:
    _check_rounding(rounding)
    _check_overflow(overflow)
    raw = round_shift(x.raw, x.fmt.frac - fmt.frac, rounding)
    return FxWord(fit_raw(raw, fmt, overflow), fmt)
