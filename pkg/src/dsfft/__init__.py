"""Bit-exact digit-slicing multiplier-less FFT butterfly toolkit."""
from .butterfly import (
    ComplexFx,
    RequantPolicy,
    TwiddleTables,
    butterfly_conventional,
    butterfly_ds,
    make_twiddle_tables,
)
from .digit_slicing import SliceParams, SlicedWord, slice_a1, slice_a2, slice_complex, unslice_a1, unslice_a2
from .fft_core import FftPlan, bit_reverse_permute, dft_reference, fft_error_report, fft_execute, plan_fft
from .fixedpoint import FxWord, QFormat, fx_add, fx_from_real, fx_mul_full, fx_requantize, fx_sub, fx_to_real
from .kernels import BACKEND
from .scml import ScmlTable, build_table, scml_mul, scml_mul_staged

__version__ = "0.1.0"
