# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernels over raw int64 words; same contract as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

BACKEND = "cython"


cdef inline int64_t _requant1(int64_t raw, int shift, int out_width,
                              int rounding, int overflow) noexcept nogil:
    cdef int64_t q, rem, half, lo, hi
    if shift > 0:
        q = raw >> shift
        if rounding:
            rem = raw - (q << shift)
            half = (<int64_t>1) << (shift - 1)
            if rem > half or (rem == half and (q & 1)):
                q += 1
    else:
        q = raw << (-shift)
    lo = -((<int64_t>1) << (out_width - 1))
    hi = ((<int64_t>1) << (out_width - 1)) - 1
    if q >= lo and q <= hi:
        return q
    if overflow:
        return <int64_t>((<uint64_t>(q - lo)) & (((<uint64_t>1) << out_width) - 1)) + lo
    return hi if q > hi else lo


cdef inline int64_t _scml1(const int64_t[:, :, ::1] roms, Py_ssize_t t, int p,
                           int64_t x) noexcept nogil:
    cdef int64_t acc = 0
    cdef int64_t mask = ((<int64_t>1) << p) - 1
    cdef Py_ssize_t k
    for k in range(roms.shape[1]):
        acc += roms[t, k, (x >> (p * k)) & mask] << (p * k)
    return acc


def requant(raw, int shift, int out_width, int rounding, int overflow):
    cdef const int64_t[::1] src = np.ascontiguousarray(raw, dtype=np.int64).ravel()
    out = np.empty(src.shape[0], dtype=np.int64)
    cdef int64_t[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _requant1(src[i], shift, out_width, rounding, overflow)
    return out.reshape(np.shape(raw))


def scml_mul(roms, int p, x):
    cdef const int64_t[:, :, ::1] r = np.ascontiguousarray(roms, dtype=np.int64)[None, :, :]
    cdef const int64_t[::1] src = np.ascontiguousarray(x, dtype=np.int64).ravel()
    out = np.empty(src.shape[0], dtype=np.int64)
    cdef int64_t[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _scml1(r, 0, p, src[i])
    return out.reshape(np.shape(x))


cdef inline void _bfly(int64_t ar, int64_t ai, int64_t br, int64_t bi, Py_ssize_t t,
                       const int64_t[::1] wr, const int64_t[::1] wi,
                       const int64_t[:, :, ::1] roms_r, const int64_t[:, :, ::1] roms_i,
                       int p, int a_shift, int shift, int out_width, int rounding,
                       int overflow, int use_ds, int64_t* out) noexcept nogil:
    cdef int64_t p_rr, p_ii, p_ri, p_ir, wb_r, wb_i
    cdef int j
    if use_ds:
        p_rr = _scml1(roms_r, t, p, br)
        p_ii = _scml1(roms_i, t, p, bi)
        p_ri = _scml1(roms_r, t, p, bi)
        p_ir = _scml1(roms_i, t, p, br)
    else:
        p_rr = wr[t] * br
        p_ii = wi[t] * bi
        p_ri = wr[t] * bi
        p_ir = wi[t] * br
    wb_r = p_rr + p_ii
    wb_i = p_ri - p_ir
    ar = ar << a_shift
    ai = ai << a_shift
    out[0] = ar + wb_r
    out[1] = ai + wb_i
    out[2] = ar - wb_r
    out[3] = ai - wb_i
    if shift >= 0:
        for j in range(4):
            out[j] = _requant1(out[j], shift, out_width, rounding, overflow)


def butterfly(ar, ai, br, bi, tw, wr, wi, roms_r, roms_i, int p, int a_shift,
              int shift, int out_width, int rounding, int overflow, bint use_ds):
    shape = np.shape(ar)
    cdef const int64_t[::1] var = np.ascontiguousarray(ar, dtype=np.int64).ravel()
    cdef const int64_t[::1] vai = np.ascontiguousarray(ai, dtype=np.int64).ravel()
    cdef const int64_t[::1] vbr = np.ascontiguousarray(br, dtype=np.int64).ravel()
    cdef const int64_t[::1] vbi = np.ascontiguousarray(bi, dtype=np.int64).ravel()
    cdef const Py_ssize_t[::1] vtw = np.ascontiguousarray(
        np.broadcast_to(tw, shape), dtype=np.intp).ravel()
    cdef const int64_t[::1] vwr = np.ascontiguousarray(wr, dtype=np.int64)
    cdef const int64_t[::1] vwi = np.ascontiguousarray(wi, dtype=np.int64)
    cdef const int64_t[:, :, ::1] rr = np.ascontiguousarray(roms_r, dtype=np.int64)
    cdef const int64_t[:, :, ::1] ri = np.ascontiguousarray(roms_i, dtype=np.int64)
    cdef Py_ssize_t n = var.shape[0], i
    res = np.empty((4, n), dtype=np.int64)
    cdef int64_t[:, ::1] vres = res
    cdef int64_t buf[4]
    with nogil:
        for i in range(n):
            _bfly(var[i], vai[i], vbr[i], vbi[i], vtw[i], vwr, vwi, rr, ri, p,
                  a_shift, shift, out_width, rounding, overflow, use_ds, buf)
            vres[0, i] = buf[0]
            vres[1, i] = buf[1]
            vres[2, i] = buf[2]
            vres[3, i] = buf[3]
    return tuple(res[j].reshape(shape) for j in range(4))


def bit_reverse_indices(Py_ssize_t n):
    cdef int m = 0
    while ((<Py_ssize_t>1) << m) < n:
        m += 1
    out = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t[::1] v = out
    cdef Py_ssize_t i, r, x
    cdef int bit
    for i in range(n):
        r = 0
        x = i
        for bit in range(m):
            r = (r << 1) | (x & 1)
            x >>= 1
        v[i] = r
    return out


def fft(re, im, wr, wi, roms_r, roms_i, int p, int a_shift, int shift,
        int out_width, int rounding, int overflow, bint use_ds):
    rev = bit_reverse_indices(np.shape(re)[1])
    out_re = np.ascontiguousarray(np.asarray(re, dtype=np.int64)[:, rev])
    out_im = np.ascontiguousarray(np.asarray(im, dtype=np.int64)[:, rev])
    cdef int64_t[:, ::1] vre = out_re
    cdef int64_t[:, ::1] vim = out_im
    cdef const int64_t[::1] vwr = np.ascontiguousarray(wr, dtype=np.int64)
    cdef const int64_t[::1] vwi = np.ascontiguousarray(wi, dtype=np.int64)
    cdef const int64_t[:, :, ::1] rr = np.ascontiguousarray(roms_r, dtype=np.int64)
    cdef const int64_t[:, :, ::1] ri = np.ascontiguousarray(roms_i, dtype=np.int64)
    cdef Py_ssize_t m = vre.shape[0], n = vre.shape[1]
    cdef Py_ssize_t row, span, start, j, top, bot, stride
    cdef int64_t buf[4]
    with nogil:
        for row in range(m):
            span = 1
            while span < n:
                stride = n // (2 * span)
                start = 0
                while start < n:
                    for j in range(span):
                        top = start + j
                        bot = top + span
                        _bfly(vre[row, top], vim[row, top], vre[row, bot], vim[row, bot],
                              j * stride, vwr, vwi, rr, ri, p, a_shift, shift,
                              out_width, rounding, overflow, use_ds, buf)
                        vre[row, top] = buf[0]
                        vim[row, top] = buf[1]
                        vre[row, bot] = buf[2]
                        vim[row, bot] = buf[3]
                    start += 2 * span
                span *= 2
    return out_re, out_im


cdef inline int64_t _rq(int64_t raw, int shift, int64_t half, int64_t lo, int64_t hi,
                        uint64_t wmask, int rounding, int overflow) noexcept nogil:
    # branch-light twin of _requant1 for shift > 0 with hoisted constants
    cdef int64_t q = raw >> shift
    cdef int64_t rem = raw - (q << shift)
    if rounding:
        q += (rem > half) | ((rem == half) & (q & 1))
    if overflow:
        return <int64_t>((<uint64_t>(q - lo)) & wmask) + lo
    return hi if q > hi else (lo if q < lo else q)


def sweep_mismatches(wr, wi, roms_r, roms_i, int p, int width, int a_shift,
                     int shift, int out_width, int rounding, int overflow):
    """Count (A, B) pairs, over every ``width``-bit A and B, where the SCML and
    multiplier butterflies disagree. Uses twiddle 0 of the given arrays.

    The four products and both W*B sums depend on B only and are formed once
    per B; every A is then pushed through both output stages and compared.
    """
    cdef const int64_t[::1] vwr = np.ascontiguousarray(wr, dtype=np.int64)
    cdef const int64_t[::1] vwi = np.ascontiguousarray(wi, dtype=np.int64)
    cdef const int64_t[:, :, ::1] rr = np.ascontiguousarray(roms_r, dtype=np.int64)
    cdef const int64_t[:, :, ::1] ri = np.ascontiguousarray(roms_i, dtype=np.int64)
    cdef int64_t lo = -((<int64_t>1) << (width - 1))
    cdef int64_t hi = (<int64_t>1) << (width - 1)
    cdef int64_t br, bi, ar, ai, ds_r, ds_i, cv_r, cv_i, a_r, a_i
    cdef int64_t mismatches = 0
    cdef int64_t half = ((<int64_t>1) << (shift - 1)) if shift > 0 else 0
    cdef int64_t olo = -((<int64_t>1) << (out_width - 1))
    cdef int64_t ohi = ((<int64_t>1) << (out_width - 1)) - 1
    cdef uint64_t wmask = ((<uint64_t>1) << out_width) - 1
    cdef int differ
    if shift <= 0:
        raise ValueError("sweep needs a positive output shift")
    with nogil:
        for br in range(lo, hi):
            for bi in range(lo, hi):
                ds_r = _scml1(rr, 0, p, br) + _scml1(ri, 0, p, bi)
                ds_i = _scml1(rr, 0, p, bi) - _scml1(ri, 0, p, br)
                cv_r = vwr[0] * br + vwi[0] * bi
                cv_i = vwr[0] * bi - vwi[0] * br
                for ar in range(lo, hi):
                    a_r = ar << a_shift
                    for ai in range(lo, hi):
                        a_i = ai << a_shift
                        differ = (
                            (_rq(a_r + ds_r, shift, half, olo, ohi, wmask, rounding, overflow)
                             != _rq(a_r + cv_r, shift, half, olo, ohi, wmask, rounding, overflow))
                            | (_rq(a_i + ds_i, shift, half, olo, ohi, wmask, rounding, overflow)
                               != _rq(a_i + cv_i, shift, half, olo, ohi, wmask, rounding, overflow))
                            | (_rq(a_r - ds_r, shift, half, olo, ohi, wmask, rounding, overflow)
                               != _rq(a_r - cv_r, shift, half, olo, ohi, wmask, rounding, overflow))
                            | (_rq(a_i - ds_i, shift, half, olo, ohi, wmask, rounding, overflow)
                               != _rq(a_i - cv_i, shift, half, olo, ohi, wmask, rounding, overflow))
                        )
                        mismatches += differ
    return mismatches
