import numpy as np
import pytest
from hypothesis import given, strategies as st

from dsfft import kernels
from dsfft.digit_slicing import SliceError, SliceParams
from dsfft.fft_core import plan_fft
from dsfft.fixedpoint import FxWord, QFormat, fx_from_real, fx_mul_full
from dsfft.scml import (
    build_table,
    decode,
    dump_table,
    parse_table_dump,
    scml_mul,
    scml_mul_staged,
    write_table_dump,
)

from conftest import P4B2, P4B4, Q8, Q16


def test_unit_constant_exposes_decode():
    t = build_table(FxWord(1, Q8), P4B2)
    assert t.roms[0] == tuple(range(16))
    assert t.roms[1] == (0, 1, 2, 3, 4, 5, 6, 7, -8, -7, -6, -5, -4, -3, -2, -1)
    assert t.entry_width == 12


def test_zero_constant():
    t = build_table(FxWord(0, Q16), P4B4)
    assert all(v == 0 for rom in t.roms for v in rom)


def test_entries_match_bigint_oracle():
    c = fx_from_real(0.7071, Q16)
    t = build_table(c, P4B4)
    assert len(t.roms) == 4 and all(len(r) == 16 for r in t.roms)
    for k in range(4):
        for s in range(16):
            digit = s - 16 if (k == 3 and s >= 8) else s
            assert t.roms[k][s] == c.raw * digit
            assert decode(k, s, P4B4) == digit


def test_entry_width_bounds_extremes():
    c = FxWord(Q16.min_raw, Q16)
    t = build_table(c, P4B4)
    lim = 1 << (t.entry_width - 1)
    assert all(-lim <= v < lim for rom in t.roms for v in rom)


def test_table_size_law():
    for params in (P4B2, P4B4, SliceParams(2, 8), SliceParams(8, 2)):
        c = FxWord(123, Q16)
        t = build_table(c, params)
        enumerated = sum(len(rom) for rom in t.roms) * t.entry_width
        assert t.total_rom_bits == enumerated == params.b * 2**params.p * (16 + params.p)


def test_build_rejects_a2():
    with pytest.raises(SliceError):
        build_table(FxWord(1, Q16), SliceParams(4, 3, "A2"))


def test_build_deterministic():
    c = fx_from_real(-0.3827, Q16)
    assert build_table(c, P4B4) == build_table(c, P4B4)


def test_scml_mul_examples():
    t = build_table(fx_from_real(0.5, Q8), P4B2)
    y = scml_mul(t, fx_from_real(-0.65625, Q8))
    assert y.fmt == QFormat(16, 14)
    assert float(y) == -0.328125
    assert scml_mul(t, FxWord(0, Q8)).raw == 0
    with pytest.raises(SliceError):
        scml_mul(t, FxWord(0, Q16))


def test_scml_exhaustive_q8_all_constants():
    for c_raw in range(-128, 128):
        c = FxWord(c_raw, Q8)
        t = build_table(c, P4B2)
        for x_raw in range(-128, 128):
            x = FxWord(x_raw, Q8)
            assert scml_mul(t, x) == fx_mul_full(c, x)


def test_scml_exhaustive_16bit_fft8_twiddles():
    plan = plan_fft(8)
    xs = np.arange(Q16.min_raw, Q16.max_raw + 1)
    for tt in plan.twiddles:
        for t in (tt.wr_table, tt.wi_table):
            got = kernels.scml_mul_batch(t, xs)
            assert np.array_equal(got, t.constant.raw * xs)


def test_staged_agrees_and_traces(rng):
    t = build_table(fx_from_real(0.9239, Q16), P4B4)
    for raw in rng.integers(-2**15, 2**15, 3000):
        x = FxWord(int(raw), Q16)
        y, trace = scml_mul_staged(t, x)
        assert y == scml_mul(t, x)
        assert trace.result == y.raw
        assert len(trace.levels) == 2
        # pass-through bits equal the low bits of the lower operand (bit-field oracle)
        lv1, lv2 = trace.levels
        assert lv1.shift == 4 and lv2.shift == 8
        assert lv1.passthrough == (trace.lookups[0] & 0xF, trace.lookups[2] & 0xF)
        assert lv2.passthrough == (lv1.partials[0] & 0xFF,)
        for k, part in enumerate(lv1.partials):
            assert part == trace.lookups[2 * k] + (trace.lookups[2 * k + 1] << 4)


def test_staged_zero():
    t = build_table(fx_from_real(0.9239, Q16), P4B4)
    _, trace = scml_mul_staged(t, FxWord(0, Q16))
    assert all(v == 0 for v in trace.lookups)
    assert all(v == 0 for lv in trace.levels for v in lv.partials + lv.passthrough)


@given(st.integers(-2**11, 2**11 - 1), st.integers(-2**11, 2**11 - 1))
def test_staged_odd_block_count(c_raw, x_raw):
    params = SliceParams(4, 3)
    fmt = QFormat(12, 11)
    t = build_table(FxWord(c_raw, fmt), params)
    y, trace = scml_mul_staged(t, FxWord(x_raw, fmt))
    assert y.raw == c_raw * x_raw
    assert len(trace.levels) == 2


def test_table_dump_roundtrip(tmp_path):
    c = fx_from_real(-0.7071, Q16)
    t = build_table(c, P4B4)
    text = dump_table(t)
    lines = text.splitlines()
    assert lines[0] == f"4 4 20 {c.raw}"
    assert len(lines) == 1 + 64
    assert lines[1] == "0 0 0"
    assert lines[-1] == f"3 15 {-c.raw}"
    assert parse_table_dump(text, Q16) == t
    path = write_table_dump(t, tmp_path / "w.txt")
    assert path.read_bytes() == text.encode()
