import numpy as np
import pytest
from hypothesis import given, strategies as st

from dsfft.signal_io import (
    SignalFormatError,
    detect_format,
    from_hex,
    load_signal,
    read_csv,
    read_hex,
    read_json,
    to_hex,
    write_csv,
    write_hex,
    write_json,
)


def test_hex_examples():
    assert to_hex(-1, 16) == "ffff"
    assert to_hex(-32768, 16) == "8000"
    assert to_hex(5, 20) == "00005"
    assert to_hex(-1, 9) == "1ff"
    assert from_hex("8000", 16) == -32768 and from_hex("1ff", 9) == -1
    with pytest.raises(SignalFormatError):
        to_hex(256, 9)
    with pytest.raises(SignalFormatError):
        from_hex("3ff", 9)


@given(st.integers(2, 64).flatmap(lambda w: st.tuples(st.just(w), st.integers(-(1 << (w - 1)), (1 << (w - 1)) - 1))))
def test_hex_roundtrip(wr):
    w, raw = wr
    assert from_hex(to_hex(raw, w), w) == raw


def test_hex_lines_roundtrip():
    rows = [(1, -2, 3, -4), (32767, -32768, 0, 0)]
    text = write_hex(rows, 16)
    assert text == "0001 fffe 0003 fffc\n7fff 8000 0000 0000\n"
    assert read_hex(text + "\n", 16) == rows


def test_csv_json_roundtrip(rng):
    z = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    assert np.array_equal(read_csv(write_csv(z)), z)
    assert np.array_equal(read_json(write_json(z)), z)


def test_parse_errors():
    with pytest.raises(SignalFormatError):
        read_csv("1,2\n3\n")
    with pytest.raises(SignalFormatError):
        read_csv("1,x\n")
    with pytest.raises(SignalFormatError):
        read_json('{"a": 1}')
    with pytest.raises(SignalFormatError):
        read_json("[[1, 2, 3]]")


def test_load_signal(tmp_path):
    assert detect_format("a.JSON") == "json" and detect_format("a.hex") == "hex"
    assert detect_format("a.txt") == "csv"
    p = tmp_path / "s.hex"
    p.write_text("4000 c000\n0000 0001\n")
    z = load_signal(p)
    assert z.tolist() == [0.5 - 0.5j, 2.0**-15 * 1j]
    assert load_signal(p, width=16, frac=14)[0] == 1 - 1j
    p.write_text("4000\n")
    with pytest.raises(SignalFormatError):
        load_signal(p)
    c = tmp_path / "s.dat"
    c.write_text("0.25,-0.5\n\n")
    assert load_signal(c).tolist() == [0.25 - 0.5j]
