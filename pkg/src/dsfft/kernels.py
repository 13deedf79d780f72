"""Batched raw-integer kernels with backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
implementation takes over. Set ``DSFFT_BACKEND=python`` to force the fallback.
Both backends are bit-identical, which the test-suite checks directly.

The wrappers here translate object-level formats and policies into the shift
and width numbers the kernels take.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels
from .fixedpoint import NEAREST_EVEN, WRAP, QFormat

try:
    if os.environ.get("DSFFT_BACKEND", "").lower() == "python":
        raise ImportError("fallback forced")
    from . import _ckernels as _native
except ImportError:
    _native = None

backend = _native if _native is not None else _pykernels
BACKEND = backend.BACKEND

# int64 headroom: products plus three bits of butterfly growth plus halving
MAX_DATAPATH_BITS = 62


def get_backend(name: str | None = None):
    if name is None:
        return backend
    if name == "python":
        return _pykernels
    if name == "cython":
        if _native is None:
            raise ImportError("compiled kernels are not built")
        return _native
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _native is not None else [])


def rom_array(tables) -> np.ndarray:
    """Stack SCML tables into an (n_tables, b, 2**p) int64 array."""
    return np.array([t.roms for t in tables], dtype=np.int64)


def check_headroom(in_fmt: QFormat, tw_fmt: QFormat) -> None:
    if in_fmt.width + tw_fmt.width + 3 > MAX_DATAPATH_BITS:
        raise OverflowError(f"{in_fmt} x {tw_fmt} does not fit the int64 kernels")


def policy_args(in_fmt: QFormat, tw_fmt: QFormat, q) -> dict:
    """Kernel shift/width arguments for butterfly outputs under policy ``q``."""
    if q is None:
        return dict(a_shift=tw_fmt.frac, shift=-1, out_width=64, rounding=0, overflow=0)
    shift = in_fmt.frac + tw_fmt.frac + q.extra_shift - q.out_fmt.frac
    if shift < 0:
        raise ValueError("output format has more fraction bits than the datapath")
    return dict(
        a_shift=tw_fmt.frac,
        shift=shift,
        out_width=q.out_fmt.width,
        rounding=int(q.rounding == NEAREST_EVEN),
        overflow=int(q.overflow == WRAP),
    )


def scml_mul_batch(table, x, kern=None) -> np.ndarray:
    """Raw SCML products of ``table`` with every raw word in ``x``."""
    kern = kern or backend
    return kern.scml_mul(np.array(table.roms, dtype=np.int64), table.params.p, x)


def butterfly_batch(ar, ai, br, bi, twiddles, in_fmt, q, use_ds, tw_index=0, kern=None):
    """Batched butterflies on raw arrays.

    ``twiddles`` is a sequence of :class:`~dsfft.butterfly.TwiddleTables`;
    ``tw_index`` (scalar or array) picks one per element.
    """
    kern = kern or backend
    tw_fmt = twiddles[0].wr.fmt
    check_headroom(in_fmt, tw_fmt)
    wr = np.array([t.wr.raw for t in twiddles], dtype=np.int64)
    wi = np.array([t.wi.raw for t in twiddles], dtype=np.int64)
    roms_r = rom_array([t.wr_table for t in twiddles])
    roms_i = rom_array([t.wi_table for t in twiddles])
    ar = np.asarray(ar, dtype=np.int64)
    tw = np.broadcast_to(np.asarray(tw_index, dtype=np.intp), ar.shape)
    args = policy_args(in_fmt, tw_fmt, q)
    return kern.butterfly(
        ar, ai, br, bi, tw, wr, wi, roms_r, roms_i, twiddles[0].wr_table.params.p,
        args["a_shift"], args["shift"], args["out_width"], args["rounding"],
        args["overflow"], use_ds,
    )


def fft_batch(plan, re, im, impl=None, kern=None):
    """Run ``plan`` over each row of raw ``re``/``im`` arrays of shape (m, n)."""
    kern = kern or backend
    impl = impl or plan.impl
    re = np.atleast_2d(np.asarray(re, dtype=np.int64))
    im = np.atleast_2d(np.asarray(im, dtype=np.int64))
    if re.shape[1] != plan.n or im.shape != re.shape:
        raise ValueError(f"expected rows of length {plan.n}")
    check_headroom(plan.fmt, plan.tw_fmt)
    args = policy_args(plan.fmt, plan.tw_fmt, plan.requant)
    wr, wi, roms_r, roms_i = plan.kernel_arrays()
    return kern.fft(
        re, im, wr, wi, roms_r, roms_i, plan.slice.p, args["a_shift"], args["shift"],
        args["out_width"], args["rounding"], args["overflow"], impl == "digit_slicing",
    )
