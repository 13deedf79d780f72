"""Independent reference computations shared by the tests."""
import math
from fractions import Fraction


def rational_requant(value: Fraction, fmt, overflow, rounding):
    """Exact rational scaling, Python rounding, then saturate or wrap."""
    scaled = value * (1 << fmt.frac)
    raw = math.floor(scaled) if rounding == "truncate" else round(scaled)
    lo, hi = fmt.min_raw, fmt.max_raw
    if overflow == "saturate":
        return min(max(raw, lo), hi)
    return (raw - lo) % (1 << fmt.width) + lo


def rational_butterfly(a, bb, wr, wi, q):
    """Raw outputs of X = A + W*B, Y = A - W*B with W = wr - j*wi, in Fractions."""
    ar, ai = a.re.value, a.im.value
    br, bi = bb.re.value, bb.im.value
    cr, ci = wr.value, wi.value
    wb_r = br * cr + bi * ci
    wb_i = bi * cr - br * ci
    outs = (ar + wb_r, ai + wb_i, ar - wb_r, ai - wb_i)
    scale = Fraction(1, 2) if q.stage_shift == "half" else Fraction(1)
    return tuple(rational_requant(v * scale, q.out_fmt, q.overflow, q.rounding) for v in outs)


def recursive_fft(x):
    """Plain recursive radix-2 FFT in double precision."""
    n = len(x)
    if n == 1:
        return list(x)
    even = recursive_fft(x[0::2])
    odd = recursive_fft(x[1::2])
    out = [0j] * n
    for k in range(n // 2):
        t = complex(math.cos(-2 * math.pi * k / n), math.sin(-2 * math.pi * k / n)) * odd[k]
        out[k] = even[k] + t
        out[k + n // 2] = even[k] - t
    return out
