"""``dsfft`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
Numeric parameters come from flags, then an optional ``--config`` JSON file,
then built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import hdl_gen, signal_io
from .butterfly import ComplexFx, RequantPolicy, butterfly_ds, make_twiddle_tables
from .digit_slicing import A1, A2, SliceParams, slice_word, unslice_word
from .fft_core import (
    CONVENTIONAL,
    DIGIT_SLICING,
    IMPLEMENTATIONS,
    dft_reference,
    fft_error_report,
    fft_execute,
    plan_fft,
    quantize_twiddle,
    to_complex_array,
)
from .fixedpoint import (
    NEAREST_EVEN,
    OVERFLOW_MODES,
    ROUNDING_MODES,
    SATURATE,
    TRUNCATE,
    FxWord,
    QFormat,
    fx_from_real,
    fx_to_real,
)
from .pipeline_sim import estimate_cost
from .scml import build_table, dump_table, scml_mul

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "width": 16,
    "frac": None,  # width - 1
    "p": 4,
    "b": None,  # width // p
    "algorithm": 1,
    "rounding": NEAREST_EVEN,
    "out_rounding": TRUNCATE,
    "overflow": SATURATE,
    "scaling": "half",
    "impl": DIGIT_SLICING,
    "n": None,
    "twiddle": None,
    "constant": None,
    "vectors": 1000,
    "seed": 0,
    "design": DIGIT_SLICING,
    "constants": 1,
}


class UsageError(Exception):
    pass


def _resolve(args, config: dict) -> None:
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, config.get(key, default))


def _fmt(args) -> QFormat:
    frac = args.width - 1 if args.frac is None else args.frac
    return QFormat(args.width, frac)


def _slice_params(args, width: int, algorithm: str = A1) -> SliceParams:
    b = args.b
    if b is None:
        b = width // args.p if algorithm == A1 else (width - 1) // args.p + 1
    return SliceParams(args.p, b, algorithm)


def _policy(args, fmt: QFormat) -> RequantPolicy:
    return RequantPolicy(fmt, args.out_rounding, args.overflow, args.scaling)


# --- subcommands -----------------------------------------------------------

def cmd_slice(args) -> int:
    fmt = _fmt(args)
    algorithm = {1: A1, 2: A2}[args.algorithm]
    params = _slice_params(args, fmt.width, algorithm)
    x = fx_from_real(args.value, fmt, args.rounding)
    s = slice_word(x, params)
    back = unslice_word(s)
    print(f"value   {args.value!r} -> raw {x.raw} in {fmt} ({fx_to_real(x)!r})")
    print(f"slicing {algorithm}, p={params.p}, b={params.b}")
    for k, blk in enumerate(s.blocks):
        print(f"  block {k}: {blk:>6}  weight 2^{params.weight_shift(k) - fmt.frac}")
    terms = " + ".join(f"({blk})*2^{params.weight_shift(k)}" for k, blk in enumerate(s.blocks))
    print(f"reconstruct: [{terms}] * 2^-{fmt.frac} = {back.raw}/2^{fmt.frac} = {fx_to_real(back)!r}")
    ok = back == x
    print("roundtrip: " + ("EXACT" if ok else "MISMATCH"))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_table(args) -> int:
    fmt = _fmt(args)
    params = _slice_params(args, fmt.width)
    if args.constant is None:
        raise UsageError("--constant is required")
    c = fx_from_real(args.constant, fmt, args.rounding)
    text = dump_table(build_table(c, params))
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _load_samples(args, fmt: QFormat):
    try:
        z = signal_io.load_signal(args.input, args.input_format, fmt.width, fmt.frac)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    n = args.n or len(z)
    if len(z) != n:
        raise UsageError(f"input has {len(z)} samples, expected {n}")
    return z, n


def _write_spectrum(path, out, fmt: QFormat) -> None:
    path = Path(path)
    kind = signal_io.detect_format(path)
    if kind == "hex":
        text = signal_io.write_hex((v.raw for v in out), fmt.width)
    elif kind == "json":
        text = signal_io.write_json(to_complex_array(out))
    else:
        text = signal_io.write_csv(to_complex_array(out))
    path.write_text(text)


def cmd_fft(args) -> int:
    fmt = _fmt(args)
    z, n = _load_samples(args, fmt)
    params = _slice_params(args, fmt.width)
    q = _policy(args, fmt)
    try:
        plan = plan_fft(n, fmt, params, q, args.impl)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    x = [
        ComplexFx(fx_from_real(v.real, fmt, args.rounding), fx_from_real(v.imag, fmt, args.rounding))
        for v in z
    ]
    out = fft_execute(plan, x)
    if args.output:
        _write_spectrum(args.output, out, fmt)
        print(f"wrote {args.output} ({n} bins, {args.impl})")
    status = EXIT_OK
    if args.compare:
        other = CONVENTIONAL if args.impl == DIGIT_SLICING else DIGIT_SLICING
        out2 = fft_execute(plan_fft(n, fmt, params, q, other), x)
        match = [v.raw for v in out] == [v.raw for v in out2]
        xq = to_complex_array(x)
        m = fft_error_report(out, dft_reference(xq, n), plan)
        print(f"max abs error: {m.max_abs:.6e}")
        print(f"rms error:     {m.rms:.6e}")
        print(f"snr:           {m.snr_db:.2f} dB")
        print(f"implementations: {'MATCH' if match else 'MISMATCH'}")
        if not match:
            status = EXIT_VERIFY
    elif not args.output:
        sys.stdout.write(signal_io.write_csv(to_complex_array(out)))
    return status


def cmd_cost(args) -> int:
    fmt = _fmt(args)
    params = _slice_params(args, fmt.width)
    constants = args.n // 2 if args.n else args.constants
    report = estimate_cost(args.design, fmt, params, constants)
    sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_hdlgen(args) -> int:
    fmt = _fmt(args)
    params = _slice_params(args, fmt.width)
    if params.p * params.b != fmt.width:
        raise UsageError(f"p={params.p}, b={params.b} does not cover {fmt}")
    rng = np.random.default_rng(args.seed)
    name = args.name
    count = args.vectors
    if count < 1:
        raise UsageError("--vectors must be >= 1")
    lo, hi = fmt.min_raw, fmt.max_raw + 1
    if args.constant is not None:
        c = fx_from_real(args.constant, fmt, args.rounding)
        t = build_table(c, params)
        rtl, roms = hdl_gen.emit_scml(t, name)
        layout = hdl_gen.scml_layout(t)
        xs = rng.integers(lo, hi, count)
        vectors = [((int(v),), (scml_mul(t, FxWord(int(v), fmt)).raw,)) for v in xs]
    else:
        if args.n is None or args.twiddle is None:
            raise UsageError("give either --constant or both -n and --twiddle")
        if not 0 <= args.twiddle < args.n // 2:
            raise UsageError(f"twiddle index must be in [0, {args.n // 2})")
        tt = make_twiddle_tables(*quantize_twiddle(args.twiddle, args.n, fmt), params)
        q = _policy(args, fmt)
        rtl, roms = hdl_gen.emit_butterfly(tt, q, name, fmt)
        layout = hdl_gen.butterfly_layout(tt, q, fmt)
        raws = rng.integers(lo, hi, (count, 4))
        vectors = []
        for ar, ai, br, bi in raws.tolist():
            a, bb = ComplexFx.from_raw(ar, ai, fmt), ComplexFx.from_raw(br, bi, fmt)
            xo, yo = butterfly_ds(a, bb, tt, q)
            vectors.append(((ar, ai, br, bi), (*xo.raw, *yo.raw)))
    tb, golden = hdl_gen.emit_testbench(name, vectors, layout)
    files = {f"{name}.v": rtl, f"{name}_tb.v": tb, **roms, **golden}
    try:
        written = hdl_gen.write_tree(args.outdir, files)
    except OSError as exc:
        raise UsageError(f"cannot write to {args.outdir}: {exc}") from None
    for path in written:
        print(path)
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def _add_format(p, with_slice=True):
    g = p.add_argument_group("number format")
    g.add_argument("-w", "--width", type=int, help="word width in bits (default 16)")
    g.add_argument("-f", "--frac", type=int, help="fraction bits (default width-1)")
    if with_slice:
        g.add_argument("-p", type=int, dest="p", help="bits per slice (default 4)")
        g.add_argument("-b", type=int, dest="b", help="number of slices (default width/p)")


def _add_policy(p):
    g = p.add_argument_group("output quantization")
    g.add_argument("--scaling", choices=["half", "none"], help="per-stage output scaling (default half)")
    g.add_argument("--out-rounding", choices=ROUNDING_MODES, help="butterfly output rounding (default truncate)")
    g.add_argument("--overflow", choices=OVERFLOW_MODES, help="overflow policy (default saturate)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsfft", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of parameter defaults (flags override it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("slice", help="digit-slice one value and reconstruct it")
    p.add_argument("-v", "--value", type=float, required=True, help="real value to slice")
    p.add_argument("-a", "--algorithm", type=int, choices=[1, 2], help="slicing algorithm (default 1)")
    p.add_argument("--rounding", choices=ROUNDING_MODES, help="quantization rounding")
    _add_format(p)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("table", help="build and dump the SCML ROM bank of a constant")
    p.add_argument("-c", "--constant", type=float, help="real constant")
    p.add_argument("-o", "--output", help="dump file (default stdout)")
    p.add_argument("--rounding", choices=ROUNDING_MODES, help="quantization rounding")
    _add_format(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fft", help="run the fixed-point FFT on a signal file")
    p.add_argument("input", help="signal file (.csv re,im / .json [[re,im],...] / .hex raw)")
    p.add_argument("--input-format", choices=["csv", "json", "hex"], help="override suffix detection")
    p.add_argument("-n", type=int, help="transform size (default: input length)")
    p.add_argument("--impl", choices=IMPLEMENTATIONS, help="butterfly implementation")
    p.add_argument("-o", "--output", help="spectrum file; suffix picks csv/json/hex")
    p.add_argument("--compare", action="store_true",
                   help="also run the other implementation and the double-precision DFT")
    p.add_argument("--rounding", choices=ROUNDING_MODES, help="input quantization rounding")
    _add_format(p)
    _add_policy(p)
    p.set_defaults(func=cmd_fft)

    p = sub.add_parser("cost", help="structural cost report as JSON")
    p.add_argument("--design", choices=IMPLEMENTATIONS, help="butterfly design")
    p.add_argument("--constants", type=int, help="number of complex twiddle constants (default 1)")
    p.add_argument("-n", type=int, help="FFT size; sets constants to n/2")
    _add_format(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("hdlgen", help="emit Verilog, ROM init files, testbench and golden vectors")
    p.add_argument("outdir", help="output directory")
    p.add_argument("--name", default="ds_butterfly", help="module name")
    p.add_argument("-n", type=int, help="FFT size the twiddle belongs to")
    p.add_argument("--twiddle", type=int, help="twiddle index k in [0, n/2)")
    p.add_argument("-c", "--constant", type=float, help="emit a single SCML multiplier for this constant")
    p.add_argument("--vectors", type=int, help="number of golden vectors (default 1000)")
    p.add_argument("--seed", type=int, help="stimulus seed (default 0)")
    p.add_argument("--rounding", choices=ROUNDING_MODES, help="constant quantization rounding")
    _add_format(p)
    _add_policy(p)
    p.set_defaults(func=cmd_hdlgen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            print(f"dsfft: bad config {args.config}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    _resolve(args, config)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dsfft {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"dsfft {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
