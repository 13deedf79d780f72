"""Signal file formats.

* CSV: ``re,im`` per line, real numbers.
* JSON: an array of ``[re, im]`` pairs.
* raw hex: one sample per line as ``RRRR IIII``, two's complement, zero-padded
  to ceil(width/4) digits. Lines may carry several such pairs (golden vectors).
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np


class SignalFormatError(ValueError):
    pass


def hex_digits(width: int) -> int:
    return -(-width // 4)


def to_hex(raw: int, width: int) -> str:
    if not -(1 << (width - 1)) <= raw < (1 << (width - 1)):
        raise SignalFormatError(f"{raw} does not fit {width} bits")
    return format(raw & ((1 << width) - 1), f"0{hex_digits(width)}x")


def from_hex(text: str, width: int) -> int:
    v = int(text, 16)
    if v >> width:
        raise SignalFormatError(f"{text!r} wider than {width} bits")
    return v - (1 << width) if v >> (width - 1) else v


def format_hex_line(raws, width: int) -> str:
    return " ".join(to_hex(r, width) for r in raws)


def write_hex(rows, width: int) -> str:
    """``rows`` is an iterable of raw-integer tuples; returns file text."""
    return "".join(format_hex_line(r, width) + "\n" for r in rows)


def read_hex(text: str, width: int) -> list[tuple[int, ...]]:
    return [
        tuple(from_hex(f, width) for f in line.split())
        for line in text.splitlines()
        if line.strip()
    ]


def read_csv(text: str) -> np.ndarray:
    out = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise SignalFormatError(f"line {lineno}: expected 're,im', got {row!r}")
        try:
            out.append(complex(float(row[0]), float(row[1])))
        except ValueError as exc:
            raise SignalFormatError(f"line {lineno}: {exc}") from None
    return np.array(out, dtype=complex)


def write_csv(z) -> str:
    return "".join(f"{float(v.real)!r},{float(v.imag)!r}\n" for v in np.asarray(z, dtype=complex))


def read_json(text: str) -> np.ndarray:
    data = json.loads(text)
    if not isinstance(data, list) or any(
        not isinstance(p, list) or len(p) != 2 for p in data
    ):
        raise SignalFormatError("expected a JSON array of [re, im] pairs")
    return np.array([complex(float(r), float(i)) for r, i in data], dtype=complex)


def write_json(z) -> str:
    return json.dumps([[float(v.real), float(v.imag)] for v in np.asarray(z, dtype=complex)]) + "\n"


def detect_format(path) -> str:
    suffix = Path(path).suffix.lower()
    return {".json": "json", ".hex": "hex"}.get(suffix, "csv")


def load_signal(path, fmt: str | None = None, width: int = 16, frac: int | None = None):
    """Read a signal file into a complex array (hex is scaled by 2**-frac)."""
    path = Path(path)
    fmt = fmt or detect_format(path)
    text = path.read_text()
    if fmt == "json":
        return read_json(text)
    if fmt == "hex":
        frac = width - 1 if frac is None else frac
        rows = read_hex(text, width)
        if any(len(r) != 2 for r in rows):
            raise SignalFormatError("hex signal lines must hold exactly one RRRR IIII pair")
        return np.array([complex(r, i) for r, i in rows], dtype=complex) * 2.0 ** -frac
    return read_csv(text)
