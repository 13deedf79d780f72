"""Single-constant multiplier-less (SCML) multiplication.

A constant C is multiplied by a p*b-bit word x without a multiplier: x is
sliced (A1 layout), each slice addresses a ROM holding C times every possible
digit value, and the b ROM outputs are recombined by a shift-add tree.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

from .digit_slicing import A1, SliceError, SliceParams, block_codes, slice_a1
from .fixedpoint import FxWord, QFormat, qformat


def decode(k: int, s: int, params: SliceParams) -> int:
    """Signed digit value of ROM address ``s`` in slice ``k``."""
    if k == params.b - 1 and s >= 1 << (params.p - 1):
        return s - (1 << params.p)
    return s


@dataclass(frozen=True)
class ScmlTable:
    constant: FxWord
    params: SliceParams
    roms: tuple[tuple[int, ...], ...]
    entry_width: int

    @property
    def total_rom_bits(self) -> int:
        return sum(len(rom) for rom in self.roms) * self.entry_width

    def product_format(self, x_fmt: QFormat) -> QFormat:
        return qformat(self.constant.fmt.width + x_fmt.width, self.constant.fmt.frac + x_fmt.frac)


def build_table(c: FxWord, params: SliceParams) -> ScmlTable:
    if params.algorithm != A1:
        raise SliceError("SCML tables are built for A1 slicing only")
    roms = tuple(
        tuple(c.raw * decode(k, s, params) for s in range(1 << params.p))
        for k in range(params.b)
    )
    return ScmlTable(c, params, roms, c.fmt.width + params.p)


def _lookups(t: ScmlTable, x: FxWord) -> list[int]:
    codes = block_codes(slice_a1(x, t.params))
    return [rom[s] for rom, s in zip(t.roms, codes)]


def scml_mul(t: ScmlTable, x: FxWord) -> FxWord:
    p = t.params.p
    raw = sum(v << (p * k) for k, v in enumerate(_lookups(t, x)))
    return FxWord(raw, t.product_format(x.fmt))


@dataclass(frozen=True)
class AddLevel:
    """One level of the recombination tree.

    ``shift`` is the weight gap between the two operands of each pair; the low
    ``shift`` bits of every lower operand bypass the adder (``passthrough``).
    """

    shift: int
    partials: tuple[int, ...]
    passthrough: tuple[int, ...]


@dataclass(frozen=True)
class StageTrace:
    lookups: tuple[int, ...]
    levels: tuple[AddLevel, ...]

    @property
    def result(self) -> int:
        return self.levels[-1].partials[0] if self.levels else self.lookups[0]


def tree_depth(b: int) -> int:
    return math.ceil(math.log2(b))


def combine_level(partials, shift: int) -> AddLevel:
    """Pairwise shift-add of ``partials`` (lowest weight first).

    The low ``shift`` bits of each lower operand are carried over unadded and
    only the upper part goes through the adder; an odd leftover is forwarded.
    """
    mask = (1 << shift) - 1
    out, passed = [], []
    for i in range(0, len(partials) - 1, 2):
        lo, hi = partials[i], partials[i + 1]
        low_bits = lo & mask
        upper = (lo >> shift) + hi
        out.append((upper << shift) | low_bits)
        passed.append(low_bits)
    if len(partials) % 2:
        out.append(partials[-1])
    return AddLevel(shift, tuple(out), tuple(passed))


def staged_sum(lookups, p: int) -> StageTrace:
    levels = []
    partials = tuple(lookups)
    shift = p
    while len(partials) > 1:
        level = combine_level(partials, shift)
        levels.append(level)
        partials = level.partials
        shift *= 2
    return StageTrace(tuple(lookups), tuple(levels))


def scml_mul_staged(t: ScmlTable, x: FxWord) -> tuple[FxWord, StageTrace]:
    trace = staged_sum(_lookups(t, x), t.params.p)
    return FxWord(trace.result, t.product_format(x.fmt)), trace


def dump_table(t: ScmlTable) -> str:
    """Text dump: header ``p b entry_width constant_raw`` then ``k s value`` lines."""
    buf = io.StringIO()
    buf.write(f"{t.params.p} {t.params.b} {t.entry_width} {t.constant.raw}\n")
    for k, rom in enumerate(t.roms):
        for s, v in enumerate(rom):
            buf.write(f"{k} {s} {v}\n")
    return buf.getvalue()


def write_table_dump(t: ScmlTable, path) -> Path:
    path = Path(path)
    path.write_text(dump_table(t), newline="\n")
    return path


def parse_table_dump(text: str, const_fmt: QFormat) -> ScmlTable:
    lines = text.splitlines()
    p, b, entry_width, c_raw = (int(v) for v in lines[0].split())
    params = SliceParams(p, b, A1)
    roms = [[0] * (1 << p) for _ in range(b)]
    for line in lines[1:]:
        k, s, v = (int(f) for f in line.split())
        roms[k][s] = v
    return ScmlTable(FxWord(c_raw, const_fmt), params, tuple(map(tuple, roms)), entry_width)
