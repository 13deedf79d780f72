"""Vectorized numpy kernels over raw int64 words (fallback backend).

These mirror ``_ckernels.pyx`` exactly. All arguments are raw two's-complement
integers; formats are carried by the caller as plain shift/width numbers.
Rounding codes: 0 truncate, 1 nearest-even. Overflow codes: 0 saturate, 1 wrap.
"""
import numpy as np

BACKEND = "python"


def requant(raw, shift, out_width, rounding, overflow):
    raw = np.asarray(raw, dtype=np.int64)
    if shift > 0:
        q = raw >> shift
        if rounding:
            rem = raw - (q << shift)
            half = np.int64(1) << (shift - 1)
            q = q + ((rem > half) | ((rem == half) & ((q & 1) == 1)))
    else:
        q = raw << -shift
    lo = -(1 << (out_width - 1))
    hi = (1 << (out_width - 1)) - 1
    if overflow:
        return ((q - lo) & ((1 << out_width) - 1)) + lo
    return np.clip(q, lo, hi)


def scml_mul(roms, p, x):
    """sum_k roms[k][slice_k(x)] << (p*k) for each x; ``roms`` is (b, 2**p)."""
    roms = np.asarray(roms, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    mask = (1 << p) - 1
    acc = np.zeros_like(x)
    for k in range(roms.shape[0]):
        acc += roms[k][(x >> (p * k)) & mask] << (p * k)
    return acc


def _scml_indexed(roms, tw, p, x):
    # roms: (n_tw, b, 2**p); tw: per-element table index
    mask = (1 << p) - 1
    acc = np.zeros_like(x)
    for k in range(roms.shape[1]):
        acc += roms[tw, k, (x >> (p * k)) & mask] << (p * k)
    return acc


def butterfly(ar, ai, br, bi, tw, wr, wi, roms_r, roms_i, p, a_shift,
              shift, out_width, rounding, overflow, use_ds):
    """Batched butterflies; element j uses twiddle ``tw[j]``.

    ``wr``/``wi`` hold the twiddle raws, ``roms_r``/``roms_i`` their SCML banks
    (n_tw, b, 2**p). ``a_shift`` aligns A to the product scale and ``shift`` is
    the total right shift applied before saturation/wrap. ``shift < 0`` means
    return full-precision outputs unquantized.
    """
    ar, ai, br, bi = (np.asarray(v, dtype=np.int64) for v in (ar, ai, br, bi))
    tw = np.asarray(tw, dtype=np.intp)
    if use_ds:
        p_rr = _scml_indexed(roms_r, tw, p, br)
        p_ii = _scml_indexed(roms_i, tw, p, bi)
        p_ri = _scml_indexed(roms_r, tw, p, bi)
        p_ir = _scml_indexed(roms_i, tw, p, br)
    else:
        wr_e = np.asarray(wr, dtype=np.int64)[tw]
        wi_e = np.asarray(wi, dtype=np.int64)[tw]
        p_rr, p_ii, p_ri, p_ir = wr_e * br, wi_e * bi, wr_e * bi, wi_e * br
    wb_r = p_rr + p_ii
    wb_i = p_ri - p_ir
    ar_s = ar << a_shift
    ai_s = ai << a_shift
    outs = (ar_s + wb_r, ai_s + wb_i, ar_s - wb_r, ai_s - wb_i)
    if shift < 0:
        return outs
    return tuple(requant(v, shift, out_width, rounding, overflow) for v in outs)


def bit_reverse_indices(n):
    m = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for bit in range(m):
        rev |= ((idx >> bit) & 1) << (m - 1 - bit)
    return rev


def fft(re, im, wr, wi, roms_r, roms_i, p, a_shift, shift, out_width,
        rounding, overflow, use_ds):
    """Radix-2 DIT FFT over the rows of ``re``/``im`` (shape (m, n))."""
    re = np.asarray(re, dtype=np.int64)
    im = np.asarray(im, dtype=np.int64)
    n = re.shape[1]
    rev = bit_reverse_indices(n)
    re = re[:, rev].copy()
    im = im[:, rev].copy()
    span = 1
    while span < n:
        starts = np.arange(0, n, 2 * span)
        j = np.arange(span)
        top = (starts[:, None] + j[None, :]).ravel()
        bot = top + span
        tw = np.broadcast_to(j * (n // (2 * span)), (len(starts), span)).ravel()
        tw_all = np.broadcast_to(tw, (re.shape[0], tw.size))
        xr, xi, yr, yi = butterfly(
            re[:, top], im[:, top], re[:, bot], im[:, bot], tw_all,
            wr, wi, roms_r, roms_i, p, a_shift, shift, out_width,
            rounding, overflow, use_ds,
        )
        re[:, top], im[:, top], re[:, bot], im[:, bot] = xr, xi, yr, yi
        span *= 2
    return re, im


def sweep_mismatches(wr, wi, roms_r, roms_i, p, width, a_shift, shift,
                     out_width, rounding, overflow):
    """Count (A, B) pairs where the two butterflies disagree (twiddle 0).

    Vectorized over A; loops over B. Slow at width 8 (minutes), but exact.
    """
    vals = np.arange(-(1 << (width - 1)), 1 << (width - 1), dtype=np.int64)
    ar, ai = (v.ravel() << a_shift for v in np.meshgrid(vals, vals, indexing="ij"))
    wr0, wi0 = int(wr[0]), int(wi[0])
    rr, ri = np.asarray(roms_r)[0], np.asarray(roms_i)[0]
    mismatches = 0
    for br in vals.tolist():
        for bi in vals.tolist():
            ds_r = int(scml_mul(rr, p, br) + scml_mul(ri, p, bi))
            ds_i = int(scml_mul(rr, p, bi) - scml_mul(ri, p, br))
            cv_r, cv_i = wr0 * br + wi0 * bi, wr0 * bi - wi0 * br
            differ = np.zeros(ar.shape, dtype=bool)
            for a, w1, w2 in ((ar, ds_r, cv_r), (ai, ds_i, cv_i)):
                for sign in (1, -1):
                    differ |= requant(a + sign * w1, shift, out_width, rounding, overflow) != \
                        requant(a + sign * w2, shift, out_width, rounding, overflow)
            mismatches += int(differ.sum())
    return mismatches
