"""Digit slicing: split a fixed-point word into b blocks of p bits.

Two layouts are supported.

``A1`` works on p*b-bit words. ``blocks[0]`` is the least significant group,
every block is an unsigned p-bit digit except the top one, which keeps the
sign and is read as a signed p-bit number::

    raw == sum(blocks[k] << (p * k) for k in range(b))

``A2`` works on p*(b-1)+1-bit words. ``blocks[0]`` holds only the sign
(0 or -1) and the remaining blocks are unsigned p-bit fraction digits, most
significant first::

    raw == sum(blocks[k] << (p * (b - 1 - k)) for k in range(b))
"""
from __future__ import annotations

from dataclasses import dataclass

from .fixedpoint import FxWord, QFormat

A1 = "A1"
A2 = "A2"


class SliceError(ValueError):
    pass


@dataclass(frozen=True)
class SliceParams:
    p: int
    b: int
    algorithm: str = A1

    def __post_init__(self):
        if self.p < 2:
            raise SliceError(f"p must be >= 2, got {self.p}")
        if self.b < 2:
            raise SliceError(f"b must be >= 2, got {self.b}")
        if self.algorithm not in (A1, A2):
            raise SliceError(f"unknown slicing algorithm {self.algorithm!r}")

    @property
    def word_width(self) -> int:
        if self.algorithm == A1:
            return self.p * self.b
        return self.p * (self.b - 1) + 1

    def block_range(self, k: int) -> tuple[int, int]:
        """Inclusive (lo, hi) bounds of block ``k``."""
        p = self.p
        if self.algorithm == A1:
            if k == self.b - 1:
                return -(1 << (p - 1)), (1 << (p - 1)) - 1
            return 0, (1 << p) - 1
        if k == 0:
            return -1, 0
        return 0, (1 << p) - 1

    def weight_shift(self, k: int) -> int:
        """Block ``k`` carries weight 2**weight_shift(k) in raw units."""
        if self.algorithm == A1:
            return self.p * k
        return self.p * (self.b - 1 - k)


@dataclass(frozen=True)
class SlicedWord:
    blocks: tuple[int, ...]
    params: SliceParams
    src_fmt: QFormat

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if len(self.blocks) != self.params.b:
            raise SliceError(f"expected {self.params.b} blocks, got {len(self.blocks)}")
        for k, blk in enumerate(self.blocks):
            lo, hi = self.params.block_range(k)
            if not lo <= blk <= hi:
                raise SliceError(f"block {k} = {blk} outside [{lo}, {hi}]")


def _check_width(x: FxWord, params: SliceParams, algorithm: str) -> None:
    if params.algorithm != algorithm:
        raise SliceError(f"params use {params.algorithm}, expected {algorithm}")
    if x.fmt.width != params.word_width:
        raise SliceError(
            f"{algorithm} with p={params.p}, b={params.b} needs a {params.word_width}-bit word, "
            f"got {x.fmt}"
        )


def slice_a1(x: FxWord, params: SliceParams) -> SlicedWord:
    _check_width(x, params, A1)
    p, b = params.p, params.b
    mask = (1 << p) - 1
    blocks = [(x.raw >> (p * k)) & mask for k in range(b - 1)]
    blocks.append(x.raw >> (p * (b - 1)))
    return SlicedWord(tuple(blocks), params, x.fmt)


def unslice_a1(s: SlicedWord) -> FxWord:
    if s.params.algorithm != A1:
        raise SliceError("unslice_a1 needs an A1 sliced word")
    p = s.params.p
    raw = sum(blk << (p * k) for k, blk in enumerate(s.blocks))
    return FxWord(raw, s.src_fmt)


def slice_a2(x: FxWord, params: SliceParams) -> SlicedWord:
    _check_width(x, params, A2)
    p, b = params.p, params.b
    frac_bits = p * (b - 1)
    sign = -1 if x.raw < 0 else 0
    mag = x.raw - (sign << frac_bits)
    mask = (1 << p) - 1
    digits = [(mag >> (p * (b - 1 - k))) & mask for k in range(1, b)]
    return SlicedWord((sign, *digits), params, x.fmt)


def unslice_a2(s: SlicedWord) -> FxWord:
    if s.params.algorithm != A2:
        raise SliceError("unslice_a2 needs an A2 sliced word")
    raw = sum(blk << s.params.weight_shift(k) for k, blk in enumerate(s.blocks))
    return FxWord(raw, s.src_fmt)


def slice_word(x: FxWord, params: SliceParams) -> SlicedWord:
    if params.algorithm == A1:
        return slice_a1(x, params)
    return slice_a2(x, params)


def unslice_word(s: SlicedWord) -> FxWord:
    if s.params.algorithm == A1:
        return unslice_a1(s)
    return unslice_a2(s)


def slice_complex(z, params: SliceParams) -> tuple[SlicedWord, SlicedWord]:
    """Slice the real and imaginary parts of a :class:`~dsfft.butterfly.ComplexFx`."""
    return slice_word(z.re, params), slice_word(z.im, params)


def block_codes(s: SlicedWord) -> tuple[int, ...]:
    """The p-bit unsigned bit pattern of each block (ROM address form)."""
    mask = (1 << s.params.p) - 1
    return tuple(blk & mask for blk in s.blocks)
